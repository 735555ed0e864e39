#pragma once

// Spectral estimation of Pauli-string Hamiltonians by time evolution:
// exact diagonalization oracle, gate-level circuit IR and simulators,
// hardware-efficient controlled-rotation synthesis with routing and
// fidelity estimation, the Hadamard-test protocol on a maximally mixed
// state, the classical stochastic-sampling baseline, and DFT-based
// spectral extraction.

#include "qspec/circuit.hpp"
#include "qspec/error.hpp"
#include "qspec/io.hpp"
#include "qspec/pauli.hpp"
#include "qspec/protocol.hpp"
#include "qspec/rng.hpp"
#include "qspec/simulator.hpp"
#include "qspec/spectral.hpp"
#include "qspec/synthesis.hpp"
#include "qspec/timeseries.hpp"
