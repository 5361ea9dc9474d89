#pragma once

// Umbrella header: exact separability toolkit for preference orders on the
// power set of [n] — voter-basis linear algebra, a brute-force separability
// oracle, tree-character construction, and batch verification harnesses.

#include "sepkit/dyadic.hpp"
#include "sepkit/errors.hpp"
#include "sepkit/groundset.hpp"
#include "sepkit/harness.hpp"
#include "sepkit/oracle.hpp"
#include "sepkit/preference.hpp"
#include "sepkit/serialize.hpp"
#include "sepkit/tree.hpp"
