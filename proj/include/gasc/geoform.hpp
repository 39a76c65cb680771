// Copyright 2026 The GASC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Geometric problem representation and the dialect filters.
//
// A problem is a straight-line construction (free points first, then derived
// objects) followed by a single conjecture over points. Three surface forms
// exist: the GCLC-like text dialect (parse + emit), the `.gf.json` exchange
// document (read + write) and a one-way GeoGebra command script.
//
// All functions here are pure.

#ifndef GASC_GEOFORM_HPP
#define GASC_GEOFORM_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gasc/util.hpp"

namespace gasc::geoform {

enum class ObjectKind { Point, Line, Circle };

enum class StepOp {
  Line,                  // line(P, Q) -> l
  Intersection,          // intersection(l, m) -> P
  Midpoint,              // midpoint(P, Q) -> M
  ParallelThrough,       // parallel_through(l, P) -> m
  PerpendicularThrough,  // perpendicular_through(l, P) -> m
  Foot,                  // foot(P, l) -> F
  Circle,                // circle(center P, through Q) -> c
};

inline constexpr StepOp kAllStepOps[] = {
    StepOp::Line,    StepOp::Intersection,         StepOp::Midpoint,
    StepOp::ParallelThrough, StepOp::PerpendicularThrough, StepOp::Foot,
    StepOp::Circle,
};

enum class Predicate {
  Collinear,
  Parallel,
  Perpendicular,
  Midpoint,
  EqualDistance,
  Concyclic,
};

inline constexpr Predicate kAllPredicates[] = {
    Predicate::Collinear,     Predicate::Parallel,  Predicate::Perpendicular,
    Predicate::Midpoint,      Predicate::EqualDistance, Predicate::Concyclic,
};

struct OpSignature {
  std::vector<ObjectKind> args;
  ObjectKind result;
};

const OpSignature& signature(StepOp op);
std::size_t arity(Predicate p);

// Exchange names ("parallel_through") and text keywords ("parallel").
std::string_view op_name(StepOp op);
std::optional<StepOp> op_from_name(std::string_view name);
std::string_view op_keyword(StepOp op);
std::optional<StepOp> op_from_keyword(std::string_view kw);
std::string_view predicate_name(Predicate p);
std::optional<Predicate> predicate_from_name(std::string_view name);

// Coordinates keep their decimal literal verbatim.
struct FreePoint {
  std::string name;
  std::string x;
  std::string y;
  bool operator==(const FreePoint&) const = default;
};

struct Step {
  StepOp op;
  std::vector<std::string> args;
  std::vector<std::string> out;
  bool operator==(const Step&) const = default;
};

struct Construction {
  std::vector<FreePoint> free_points;
  std::vector<Step> steps;
  bool operator==(const Construction&) const = default;
};

struct Conjecture {
  Predicate predicate;
  std::vector<std::string> args;
  bool operator==(const Conjecture&) const = default;
};

// `id` is either empty (anonymous problem) or matches GEO\d{4}.
struct GeoProblem {
  std::string id;
  Construction construction;
  Conjecture conjecture;
  bool operator==(const GeoProblem&) const = default;
};

bool is_valid_identifier(std::string_view name);
bool is_valid_decimal(std::string_view literal);
bool is_valid_problem_id(std::string_view id);

// Re-checks every invariant; throws gasc::Error on the first violation.
void validate(const GeoProblem& p);

GeoProblem parse_gclc_subset(std::string_view text);
std::string emit_gclc(const GeoProblem& p);
std::string emit_ggb_script(const GeoProblem& p);

GeoProblem read_exchange(const Json& doc);
Json write_exchange(const GeoProblem& p);

enum class Dialect { Gclc, Exchange, Ggb };

std::string_view dialect_name(Dialect d);
std::optional<Dialect> dialect_from_name(std::string_view name);
// ".gcl", ".gf.json", ".ggb"
std::string_view default_suffix(Dialect d);

std::string emit(const GeoProblem& p, Dialect d);

// Chooses the reader by file suffix (.gcl or .json).
GeoProblem load_problem_file(const std::string& path);

}  // namespace gasc::geoform

#endif  // GASC_GEOFORM_HPP
