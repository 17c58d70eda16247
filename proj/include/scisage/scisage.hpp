#pragma once

// Umbrella header: the whole survey-generation engine.
// (The CLI front end lives in scisage/cli.hpp and is not pulled in here,
// keeping argument-parser machinery out of library consumers.)

#include "scisage/collector.hpp"
#include "scisage/common.hpp"
#include "scisage/composer.hpp"
#include "scisage/config.hpp"
#include "scisage/evaluator.hpp"
#include "scisage/gateway.hpp"
#include "scisage/interpreter.hpp"
#include "scisage/organizer.hpp"
#include "scisage/pipeline.hpp"
#include "scisage/prompts.hpp"
#include "scisage/refiner.hpp"
#include "scisage/reflector.hpp"
#include "scisage/serialization.hpp"
#include "scisage/types.hpp"
