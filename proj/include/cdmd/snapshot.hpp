#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cdmd/matrix.hpp"

namespace cdmd {

/// Ordered compartment names with a uniform per-compartment node count.
/// Defines how a stacked state vector slices into physical fields.
struct CompartmentLayout {
    std::vector<std::string> names;
    std::size_t node_count = 0; // s, shared by every compartment

    std::size_t compartments() const { return names.size(); }
    std::size_t state_dim() const { return names.size() * node_count; }

    void validate() const;
    std::string to_string() const;              // "s:32,i:32,..."
    static CompartmentLayout parse(const std::string& text);

    bool operator==(const CompartmentLayout&) const = default;
};

/// Column-per-timestep state history plus the metadata needed to interpret
/// it: output step, compartment slicing, and the measure of one grid cell
/// for discrete integrals.
struct SnapshotMatrix {
    Matrix data; // state_dim x (m+1)
    double dt = 0.0;
    CompartmentLayout layout;
    double cell_weight = 1.0;

    std::size_t columns() const { return data.cols(); }
    void validate() const;
};

/// Rearranges the history into the shifted pair (columns 0..m-1, 1..m).
std::pair<Matrix, Matrix> split_pair(const SnapshotMatrix& y);

/// Row-concatenates single-compartment histories in the given order.
SnapshotMatrix stack_coupled(const std::vector<SnapshotMatrix>& parts);

/// Contiguous slice of compartment i from a stacked state vector.
std::vector<double> extract_compartment(std::span<const double> state,
                                        const CompartmentLayout& layout, std::size_t i);

/// Single-compartment view of one block of a stacked history.
SnapshotMatrix compartment_history(const SnapshotMatrix& y, std::size_t i);

/// Block-permuted copy: result block j is input block perm[j].
SnapshotMatrix permute_compartments(const SnapshotMatrix& y, const std::vector<std::size_t>& perm);

/// Snapshot file format (UTF-8 text): `SNAPSHOTS v1`, `dt=`, `cell_weight=`,
/// `layout=`, optional `key=value` metadata lines, then one CSV row per state
/// row at 17 significant digits.
void write_snapshot_file(const std::string& path, const SnapshotMatrix& y,
                         const std::vector<std::pair<std::string, std::string>>& metadata = {});
SnapshotMatrix read_snapshot_file(const std::string& path,
                                  std::vector<std::pair<std::string, std::string>>* metadata = nullptr);

} // namespace cdmd
