#pragma once

#include "aoigame/analysis.hpp"
#include "aoigame/harness/calibration.hpp"
#include "aoigame/harness/io.hpp"
#include "aoigame/harness/oracle.hpp"
#include "aoigame/harness/sweep.hpp"
#include "aoigame/harness/verify.hpp"
#include "aoigame/model.hpp"
#include "aoigame/montecarlo.hpp"
#include "aoigame/solver.hpp"
