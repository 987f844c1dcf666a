// Compiles the umbrella header on its own with strict warnings, so a
// header that forgets an include breaks the build here first.
#include "minsurf/minsurf.hpp"
