#pragma once

#include "semconf/error.hpp"
#include "semconf/trace_model.hpp"
#include "semconf/refusal_labeler.hpp"
#include "semconf/neighbor_index.hpp"
#include "semconf/token_signals.hpp"
#include "semconf/confusion_metrics.hpp"
#include "semconf/cohort_analysis.hpp"
#include "semconf/dataset_gates.hpp"
#include "semconf/guard_audit.hpp"
#include "semconf/config.hpp"
#include "semconf/reports.hpp"
