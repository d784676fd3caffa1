#pragma once

#include "explorebench/agents.hpp"
#include "explorebench/episode.hpp"
#include "explorebench/harness.hpp"
#include "explorebench/llm.hpp"
#include "explorebench/metrics.hpp"
#include "explorebench/oracle.hpp"
#include "explorebench/palette.hpp"
#include "explorebench/report.hpp"
#include "explorebench/rng.hpp"
#include "explorebench/runlog.hpp"
#include "explorebench/textio.hpp"
#include "explorebench/types.hpp"
#include "explorebench/world_index.hpp"
#include "explorebench/world_io.hpp"
#include "explorebench/worldgen.hpp"
