#pragma once

#include "lpnp/cg.hpp"
#include "lpnp/dense_weights.hpp"
#include "lpnp/denoiser.hpp"
#include "lpnp/error.hpp"
#include "lpnp/image.hpp"
#include "lpnp/image_io.hpp"
#include "lpnp/integral_image.hpp"
#include "lpnp/iteration_log.hpp"
#include "lpnp/problems.hpp"
#include "lpnp/qis.hpp"
#include "lpnp/rng.hpp"
#include "lpnp/solver.hpp"
#include "lpnp/superres.hpp"
