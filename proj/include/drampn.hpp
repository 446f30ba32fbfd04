#pragma once

#include "drampn/build.hpp"
#include "drampn/coordinate.hpp"
#include "drampn/dsl.hpp"
#include "drampn/error.hpp"
#include "drampn/expr.hpp"
#include "drampn/metrics.hpp"
#include "drampn/model.hpp"
#include "drampn/mutate.hpp"
#include "drampn/net.hpp"
#include "drampn/report.hpp"
#include "drampn/semantics.hpp"
#include "drampn/traces.hpp"
#include "drampn/validate.hpp"
