#pragma once

#include "mmwcs/bounds.hpp"
#include "mmwcs/channel.hpp"
#include "mmwcs/config.hpp"
#include "mmwcs/errors.hpp"
#include "mmwcs/harness.hpp"
#include "mmwcs/metrics.hpp"
#include "mmwcs/pipeline.hpp"
#include "mmwcs/recovery.hpp"
#include "mmwcs/rng.hpp"
#include "mmwcs/sounding.hpp"
#include "mmwcs/superres.hpp"
#include "mmwcs/tracy_widom.hpp"
