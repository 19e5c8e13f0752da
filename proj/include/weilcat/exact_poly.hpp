#pragma once

#include "weilcat/bigint.hpp"
#include "weilcat/cyclotomic.hpp"
#include "weilcat/factor.hpp"
#include "weilcat/modp.hpp"
#include "weilcat/poly.hpp"
#include "weilcat/power_sums.hpp"
#include "weilcat/resultant.hpp"
#include "weilcat/sqrtq.hpp"
#include "weilcat/sturm.hpp"
