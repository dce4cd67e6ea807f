#pragma once

#include "qtripwire/config.hpp"
#include "qtripwire/detection.hpp"
#include "qtripwire/errors.hpp"
#include "qtripwire/interferometer.hpp"
#include "qtripwire/monitor.hpp"
#include "qtripwire/oracle.hpp"
#include "qtripwire/record_io.hpp"
#include "qtripwire/rng.hpp"
#include "qtripwire/scenario.hpp"
#include "qtripwire/schedule.hpp"
#include "qtripwire/source.hpp"
#include "qtripwire/units.hpp"
