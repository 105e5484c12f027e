#pragma once

#include "chaoswork/dynamics.hpp"
#include "chaoswork/errors.hpp"
#include "chaoswork/parallel.hpp"
#include "chaoswork/phase_point.hpp"
#include "chaoswork/potentials.hpp"
#include "chaoswork/process.hpp"
#include "chaoswork/quantum.hpp"
#include "chaoswork/rng.hpp"
#include "chaoswork/semiclassical.hpp"
#include "chaoswork/systems.hpp"
#include "chaoswork/thermal.hpp"
#include "chaoswork/version.hpp"
#include "chaoswork/work_distribution.hpp"
