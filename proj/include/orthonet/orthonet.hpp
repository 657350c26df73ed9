#ifndef ORTHONET_ORTHONET_HPP
#define ORTHONET_ORTHONET_HPP

// Umbrella header: orthographic-projection object descriptors, the
// instance-based open-ended learner, and the simulated-teacher protocol.

#include "orthonet/config.hpp"
#include "orthonet/dataset.hpp"
#include "orthonet/embedding.hpp"
#include "orthonet/frame.hpp"
#include "orthonet/io.hpp"
#include "orthonet/learner.hpp"
#include "orthonet/projection.hpp"
#include "orthonet/protocol.hpp"
#include "orthonet/rng.hpp"
#include "orthonet/sampling.hpp"
#include "orthonet/sym_eigen.hpp"
#include "orthonet/types.hpp"

#endif  // ORTHONET_ORTHONET_HPP
