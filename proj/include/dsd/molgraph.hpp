// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsd/errors.hpp"

namespace dsd {

enum class Chirality : uint8_t { None = 0, Clockwise, CounterClockwise };
enum class BondOrder : uint8_t { Single = 0, Double, Triple, Aromatic };
enum class BondStereo : uint8_t { None = 0, Z, E };

struct Atom {
  std::string element;     // element symbol, e.g. "C", "Cl"
  int atomic_number = 0;
  int formal_charge = 0;
  int explicit_h = 0;      // H count written in a bracket atom
  int implicit_h = 0;      // derived from the valence rule
  bool is_aromatic = false;
  Chirality chirality = Chirality::None;
  int radical_electrons = 0;
  bool is_virtual = false;

  int total_h() const { return explicit_h + implicit_h; }
};

struct Bond {
  int a = 0;
  int b = 0;  // endpoints, unordered
  BondOrder order = BondOrder::Single;
  BondStereo stereo = BondStereo::None;
  bool is_conjugated = false;
};

struct MolecularGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<bool> ring_membership;
  bool has_virtual_node = false;
  std::optional<int> virtual_index;

  std::size_t num_atoms() const { return atoms.size(); }
  // Bond count of atom i, excluding virtual edges.
  int degree(int i) const;
  // Sum of bond orders at atom i (aromatic counts 1.5), excluding virtual.
  double bond_order_sum(int i) const;
  bool bonded(int i, int j) const;
};

int atomic_number_of(const std::string& element);

// Cycle perception: recomputes ring_membership from the bond graph
// (virtual node and its edges excluded).
void perceive_rings(MolecularGraph& g);

// Number of independent cycles (bonds - atoms + components), virtual excluded.
int cycle_count(const MolecularGraph& g);

// Default-valence implicit hydrogen assignment for every non-bracket-derived
// atom; idempotent, never negative. Atoms with explicit_h keep implicit_h = 0.
int implicit_hydrogens(const Atom& a, double bond_order_sum);

MolecularGraph parse_smiles(const std::string& text);
std::string write_smiles(const MolecularGraph& g);

MolecularGraph add_virtual_node(const MolecularGraph& g);

// Structure comparison used by round-trip tests: multiset of atom attribute
// tuples, sorted degree sequence, bond-order multiset and cycle count.
bool same_structure(const MolecularGraph& a, const MolecularGraph& b);

// Isomorphism-invariant content hash (keys the oracle's noise stream).
uint64_t structure_hash(const MolecularGraph& g);

struct GeneratorParams {
  int min_atoms = 8;
  int max_atoms = 30;
  // weights over {C, N, O, S, F, Cl}
  std::vector<double> element_weights = {6.0, 1.5, 1.5, 0.5, 0.5, 0.5};
  int min_ring_closures = 0;
  int max_ring_closures = 2;
  double aromatic_ring_probability = 0.3;
  uint64_t seed = 0;
};

std::vector<MolecularGraph> generate_random_library(const GeneratorParams& p,
                                                    int count);

}  // namespace dsd
