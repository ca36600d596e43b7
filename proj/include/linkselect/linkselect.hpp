#pragma once

#include "linkselect/approx.hpp"
#include "linkselect/extensions.hpp"
#include "linkselect/fullaccept.hpp"
#include "linkselect/hardness.hpp"
#include "linkselect/harness.hpp"
#include "linkselect/lp_bound.hpp"
#include "linkselect/model.hpp"
#include "linkselect/oracle.hpp"
#include "linkselect/parallel.hpp"
#include "linkselect/search.hpp"
#include "linkselect/simplex.hpp"
