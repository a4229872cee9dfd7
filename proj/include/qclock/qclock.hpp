#pragma once

#include "qclock/bounds.hpp"
#include "qclock/channels.hpp"
#include "qclock/distinguish.hpp"
#include "qclock/error.hpp"
#include "qclock/fisher.hpp"
#include "qclock/io.hpp"
#include "qclock/linalg.hpp"
#include "qclock/qstate.hpp"
#include "qclock/sweep.hpp"
