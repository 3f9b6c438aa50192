#pragma once

// Umbrella header: traffic velocity distributions and VANET link-duration
// analysis, end to end. Individual headers can be included on their own.

#include "linklife/connectivity.hpp"
#include "linklife/distributions.hpp"
#include "linklife/empirical.hpp"
#include "linklife/fit.hpp"
#include "linklife/ingest.hpp"
#include "linklife/io.hpp"
#include "linklife/relvel.hpp"
#include "linklife/simulate.hpp"
#include "linklife/units.hpp"
