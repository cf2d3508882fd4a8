#pragma once

#include "tmkit/core.hpp"
#include "tmkit/dsl.hpp"
#include "tmkit/engine.hpp"
#include "tmkit/importers.hpp"
#include "tmkit/render.hpp"
