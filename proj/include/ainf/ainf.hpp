#pragma once

// Everything: rings, elements, structures, relation checks, twisting,
// bounding cochains, homology, gluing and the document format.

#include "ainf/homology.hpp"
#include "ainf/mc.hpp"
#include "ainf/pairing.hpp"
#include "ainf/relations.hpp"
#include "ainf/specfmt.hpp"
#include "ainf/twist.hpp"
