#pragma once

#include "groupset/errors.hpp"
#include "groupset/group_spec.hpp"
#include "groupset/group.hpp"
#include "groupset/group_expr.hpp"
#include "groupset/random.hpp"
#include "groupset/set_rules.hpp"
#include "groupset/features.hpp"
#include "groupset/variants.hpp"
#include "groupset/gf2.hpp"
#include "groupset/analysis.hpp"
#include "groupset/facts.hpp"
#include "groupset/session.hpp"
#include "groupset/store.hpp"
#include "groupset/wire.hpp"
#include "groupset/api.hpp"
