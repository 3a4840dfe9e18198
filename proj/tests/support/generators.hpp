#pragma once

#include <random>
#include <string>

#include "cudfmoo/cudf_model.hpp"
#include "cudfmoo/mooml_syntax.hpp"

// Seeded random inputs shared by the property tests. Everything is driven by
// a caller-owned engine so any failure reproduces from the seed alone.
namespace gen {

using Rng = std::mt19937_64;

// Preamble shared by all generated documents: one property per value shape.
//   installed-size: int = 0
//   pin-priority: int = 0
//   is-security-fix: bool = false
//   tier: enum(alpha,beta,stable) = alpha
//   tag: string = "x"
cudf::Preamble standard_preamble();

// Random well-formed document: distinct (name, version) pairs, small
// dependency/conflict/provides sets, extra values for standard_preamble(),
// and a random request. Never sets embedded preferences.
cudf::CudfDoc random_doc(Rng& rng, int max_packages);

// Uniformly random subset of the universe.
cudf::Solution random_status(Rng& rng, const cudf::CudfDoc& doc);

// Random well-typed program against documents from random_doc: up to two
// definitions, an optional boolean constraint, and one or two integer
// criteria. Only projects properties declared by standard_preamble().
mooml::MoomlProgram random_program(Rng& rng);

// Noise for parser fuzzing: random bytes interleaved with document-like
// tokens so some inputs reach deeper parsing stages.
std::string random_noise(Rng& rng, int max_len);

}  // namespace gen
