// Umbrella header.
#pragma once

#include "pald/analyze.hpp"
#include "pald/blocked.hpp"
#include "pald/costmodel.hpp"
#include "pald/ingest.hpp"
#include "pald/parallel.hpp"
#include "pald/reference.hpp"
#include "pald/types.hpp"
