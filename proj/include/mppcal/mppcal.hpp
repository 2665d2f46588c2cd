// SPDX-FileCopyrightText: 2026 The mppcal authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPPCAL_MPPCAL_HPP
#define MPPCAL_MPPCAL_HPP

#include "mppcal/crosstalk.hpp"
#include "mppcal/error.hpp"
#include "mppcal/fitting.hpp"
#include "mppcal/histogram.hpp"
#include "mppcal/io.hpp"
#include "mppcal/keyvalue.hpp"
#include "mppcal/random.hpp"
#include "mppcal/simulator.hpp"

#endif  // MPPCAL_MPPCAL_HPP
