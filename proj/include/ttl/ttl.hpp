#pragma once

// Umbrella header.

#include "ttl/config.hpp"
#include "ttl/controller.hpp"
#include "ttl/csv.hpp"
#include "ttl/errors.hpp"
#include "ttl/guidance.hpp"
#include "ttl/integrator.hpp"
#include "ttl/rnn.hpp"
#include "ttl/rnn_io.hpp"
#include "ttl/simulation.hpp"
#include "ttl/training.hpp"
#include "ttl/vehicle.hpp"
