#include "ymh/algebra.hpp"

// header-only; this TU anchors the library target
