#pragma once
/// Umbrella header: delayed IS-LM model analysis, simulation and reporting.
#include "dde_sim.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "linearization.hpp"
#include "model.hpp"
#include "normal_form.hpp"
#include "params.hpp"
#include "report.hpp"
#include "stability.hpp"
#include "waveform.hpp"
