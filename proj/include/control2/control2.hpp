#pragma once

#include "control2/integer.hpp"
#include "control2/mat2.hpp"
#include "control2/subgroups.hpp"
#include "control2/word.hpp"
#include "control2/intmat.hpp"
#include "control2/presentations.hpp"
#include "control2/modmat.hpp"
#include "control2/ordinary.hpp"
#include "control2/operators.hpp"
#include "control2/verifier.hpp"
