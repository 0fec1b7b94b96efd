#include "cdmd/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace cdmd {

void CompartmentLayout::validate() const {
    if (names.empty()) throw InputError("layout: needs at least one compartment");
    if (node_count == 0) throw InputError("layout: node count must be positive");
    for (const auto& n : names) {
        if (n.empty()) throw InputError("layout: empty compartment name");
        if (n.find(',') != std::string::npos || n.find(':') != std::string::npos)
            throw InputError("layout: compartment name may not contain ',' or ':'");
    }
}

std::string CompartmentLayout::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ',';
        out += names[i] + ':' + std::to_string(node_count);
    }
    return out;
}

CompartmentLayout CompartmentLayout::parse(const std::string& text) {
    CompartmentLayout layout;
    std::stringstream ss(text);
    std::string item;
    bool first = true;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw InputError("layout: expected name:count in '" + item + "'");
        const std::string name = item.substr(0, colon);
        const std::size_t count = static_cast<std::size_t>(std::stoull(item.substr(colon + 1)));
        if (first) {
            layout.node_count = count;
            first = false;
        } else if (count != layout.node_count) {
            throw InputError("layout: node counts must be uniform across compartments");
        }
        layout.names.push_back(name);
    }
    layout.validate();
    return layout;
}

void SnapshotMatrix::validate() const {
    layout.validate();
    if (data.rows() != layout.state_dim())
        throw InputError("snapshot: data rows must equal the layout state dimension");
    if (data.cols() < 1) throw InputError("snapshot: needs at least one column");
    if (!(dt > 0.0)) throw InputError("snapshot: dt must be positive");
    if (!(cell_weight > 0.0)) throw InputError("snapshot: cell_weight must be positive");
    if (!data.all_finite()) throw InputError("snapshot: entries must be finite");
}

std::pair<Matrix, Matrix> split_pair(const SnapshotMatrix& y) {
    y.validate();
    if (y.columns() < 2) throw InputError("split_pair: needs at least two columns");
    const std::size_t n = y.data.rows(), m = y.columns() - 1;
    Matrix first(n, m), second(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            first(i, j) = y.data(i, j);
            second(i, j) = y.data(i, j + 1);
        }
    }
    return {std::move(first), std::move(second)};
}

SnapshotMatrix stack_coupled(const std::vector<SnapshotMatrix>& parts) {
    if (parts.empty()) throw InputError("stack_coupled: no parts given");
    for (const auto& p : parts) {
        p.validate();
        if (p.layout.compartments() != 1)
            throw InputError("stack_coupled: every part must hold a single compartment");
        if (p.columns() != parts[0].columns())
            throw InputError("stack_coupled: parts disagree on column count");
        if (p.dt != parts[0].dt) throw InputError("stack_coupled: parts disagree on dt");
        if (p.cell_weight != parts[0].cell_weight)
            throw InputError("stack_coupled: parts disagree on cell_weight");
        if (p.layout.node_count != parts[0].layout.node_count)
            throw InputError("stack_coupled: parts disagree on node count");
    }

    SnapshotMatrix out;
    out.dt = parts[0].dt;
    out.cell_weight = parts[0].cell_weight;
    out.layout.node_count = parts[0].layout.node_count;
    const std::size_t s = out.layout.node_count, m1 = parts[0].columns();
    out.data = Matrix(s * parts.size(), m1);
    for (std::size_t c = 0; c < parts.size(); ++c) {
        out.layout.names.push_back(parts[c].layout.names[0]);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < m1; ++j) out.data(c * s + i, j) = parts[c].data(i, j);
    }
    return out;
}

std::vector<double> extract_compartment(std::span<const double> state,
                                        const CompartmentLayout& layout, std::size_t i) {
    layout.validate();
    if (i >= layout.compartments()) throw InputError("extract_compartment: index out of range");
    if (state.size() != layout.state_dim())
        throw InputError("extract_compartment: state length does not match layout");
    const std::size_t s = layout.node_count;
    return std::vector<double>(state.begin() + i * s, state.begin() + (i + 1) * s);
}

SnapshotMatrix compartment_history(const SnapshotMatrix& y, std::size_t i) {
    y.validate();
    if (i >= y.layout.compartments())
        throw InputError("compartment_history: index out of range");
    const std::size_t s = y.layout.node_count;
    SnapshotMatrix out;
    out.dt = y.dt;
    out.cell_weight = y.cell_weight;
    out.layout.names = {y.layout.names[i]};
    out.layout.node_count = s;
    out.data = Matrix(s, y.columns());
    for (std::size_t r = 0; r < s; ++r)
        for (std::size_t j = 0; j < y.columns(); ++j) out.data(r, j) = y.data(i * s + r, j);
    return out;
}

SnapshotMatrix permute_compartments(const SnapshotMatrix& y, const std::vector<std::size_t>& perm) {
    y.validate();
    const std::size_t nc = y.layout.compartments();
    if (perm.size() != nc) throw InputError("permute_compartments: permutation size mismatch");
    std::vector<bool> seen(nc, false);
    for (std::size_t p : perm) {
        if (p >= nc || seen[p]) throw InputError("permute_compartments: not a permutation");
        seen[p] = true;
    }
    SnapshotMatrix out;
    out.dt = y.dt;
    out.cell_weight = y.cell_weight;
    out.layout.node_count = y.layout.node_count;
    out.data = Matrix(y.data.rows(), y.data.cols());
    const std::size_t s = y.layout.node_count;
    for (std::size_t j = 0; j < nc; ++j) {
        out.layout.names.push_back(y.layout.names[perm[j]]);
        for (std::size_t r = 0; r < s; ++r)
            for (std::size_t c = 0; c < y.columns(); ++c)
                out.data(j * s + r, c) = y.data(perm[j] * s + r, c);
    }
    return out;
}

void write_snapshot_file(const std::string& path, const SnapshotMatrix& y,
                         const std::vector<std::pair<std::string, std::string>>& metadata) {
    y.validate();
    std::ofstream out(path);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    out << "SNAPSHOTS v1\n";
    out << "dt=" << format_full(y.dt) << "\n";
    out << "cell_weight=" << format_full(y.cell_weight) << "\n";
    out << "layout=" << y.layout.to_string() << "\n";
    for (const auto& [k, v] : metadata) out << k << "=" << v << "\n";
    for (std::size_t i = 0; i < y.data.rows(); ++i) {
        for (std::size_t j = 0; j < y.data.cols(); ++j) {
            if (j) out << ',';
            out << format_full(y.data(i, j));
        }
        out << "\n";
    }
    if (!out) throw InputError("write to '" + path + "' failed");
}

namespace {

std::string expect_prefixed(const std::string& line, const std::string& key, const std::string& path) {
    if (line.rfind(key, 0) != 0)
        throw InputError(path + ": expected '" + key + "...' but found '" + line + "'");
    return line.substr(key.size());
}

bool is_metadata_line(const std::string& line) {
    if (line.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(line[0])) && line[0] != '_') return false;
    const auto eq = line.find('=');
    return eq != std::string::npos && line.find(',') > eq;
}

} // namespace

SnapshotMatrix read_snapshot_file(const std::string& path,
                                  std::vector<std::pair<std::string, std::string>>* metadata) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "SNAPSHOTS v1")
        throw InputError(path + ": missing 'SNAPSHOTS v1' header");

    SnapshotMatrix y;
    if (!std::getline(in, line)) throw InputError(path + ": truncated header");
    y.dt = parse_double(expect_prefixed(line, "dt=", path));
    if (!std::getline(in, line)) throw InputError(path + ": truncated header");
    y.cell_weight = parse_double(expect_prefixed(line, "cell_weight=", path));
    if (!std::getline(in, line)) throw InputError(path + ": truncated header");
    y.layout = CompartmentLayout::parse(expect_prefixed(line, "layout=", path));

    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (rows.empty() && is_metadata_line(line)) {
            const auto eq = line.find('=');
            if (metadata) metadata->emplace_back(line.substr(0, eq), line.substr(eq + 1));
            continue;
        }
        rows.push_back(line);
    }
    if (rows.size() != y.layout.state_dim())
        throw InputError(path + ": expected " + std::to_string(y.layout.state_dim()) +
                         " data rows, found " + std::to_string(rows.size()));

    std::size_t cols = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::stringstream ss(rows[i]);
        std::string cell;
        std::vector<double> values;
        while (std::getline(ss, cell, ',')) values.push_back(parse_double(cell));
        if (i == 0) {
            cols = values.size();
            if (cols == 0) throw InputError(path + ": empty data row");
            y.data = Matrix(rows.size(), cols);
        } else if (values.size() != cols) {
            throw InputError(path + ": ragged data row " + std::to_string(i));
        }
        for (std::size_t j = 0; j < cols; ++j) y.data(i, j) = values[j];
    }
    y.validate();
    return y;
}

} // namespace cdmd
