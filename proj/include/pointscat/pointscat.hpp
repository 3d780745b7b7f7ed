#pragma once

#include "core_model.hpp"
#include "errors.hpp"
#include "greens.hpp"
#include "observables.hpp"
#include "pt_closed_form.hpp"
#include "renorm.hpp"
#include "series.hpp"
#include "solver.hpp"
