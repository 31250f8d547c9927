#pragma once

#include "embed.hpp"
#include "equivalence.hpp"
#include "eval.hpp"
#include "flow.hpp"
#include "lmc.hpp"
#include "parser.hpp"
#include "rational.hpp"
#include "spotcheck.hpp"
#include "syntax.hpp"
#include "testing.hpp"
#include "typing.hpp"
