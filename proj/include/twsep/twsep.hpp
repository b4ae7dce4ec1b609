#pragma once

#include "twsep/bottomup.hpp"
#include "twsep/error.hpp"
#include "twsep/grammar.hpp"
#include "twsep/obfuscation.hpp"
#include "twsep/report.hpp"
#include "twsep/rotation.hpp"
#include "twsep/tree.hpp"
#include "twsep/walking.hpp"
#include "twsep/words.hpp"
