#pragma once

#include "finsym/check_record.hpp"
#include "finsym/config.hpp"
#include "finsym/curvature.hpp"
#include "finsym/domain.hpp"
#include "finsym/errors.hpp"
#include "finsym/expression.hpp"
#include "finsym/fd_oracle.hpp"
#include "finsym/fedosov.hpp"
#include "finsym/fields.hpp"
#include "finsym/finsler.hpp"
#include "finsym/jet.hpp"
#include "finsym/report.hpp"
#include "finsym/runner.hpp"
#include "finsym/symplectic.hpp"
#include "finsym/tensor.hpp"
