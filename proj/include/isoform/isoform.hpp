#pragma once

#include "isoform/field.hpp"
#include "isoform/poly.hpp"
#include "isoform/matrix.hpp"
#include "isoform/quadratic.hpp"
#include "isoform/classify.hpp"
#include "isoform/witness.hpp"
#include "isoform/verify.hpp"
#include "isoform/io.hpp"
