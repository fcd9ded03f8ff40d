#ifndef LINKAGE_LINKAGE_HPP
#define LINKAGE_LINKAGE_HPP

#include "linkage/core.hpp"
#include "linkage/model.hpp"
#include "linkage/geometry.hpp"
#include "linkage/redundancy.hpp"
#include "linkage/nambu.hpp"
#include "linkage/decomposition.hpp"
#include "linkage/flows.hpp"
#include "linkage/morse.hpp"
#include "linkage/io.hpp"
#include "linkage/svg.hpp"

#endif // LINKAGE_LINKAGE_HPP
