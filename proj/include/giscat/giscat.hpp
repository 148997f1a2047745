#pragma once

#include "giscat/core.hpp"
#include "giscat/direct.hpp"
#include "giscat/evolution.hpp"
#include "giscat/grid.hpp"
#include "giscat/io.hpp"
#include "giscat/marchenko.hpp"
#include "giscat/numerics.hpp"
#include "giscat/ode.hpp"
#include "giscat/potentials.hpp"
#include "giscat/reflectionless.hpp"
#include "giscat/triplets.hpp"
