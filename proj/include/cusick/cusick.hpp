#pragma once

#include "cusick/dyadic.hpp"
#include "cusick/carrydist.hpp"
#include "cusick/oracle.hpp"
#include "cusick/series.hpp"
#include "cusick/bigfloat.hpp"
#include "cusick/effbounds.hpp"
#include "cusick/charfn.hpp"
#include "cusick/scanner.hpp"
