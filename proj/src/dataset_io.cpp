#include "ep/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ep/errors.hpp"
#include "ep/rng.hpp"

namespace ep {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_on(const std::string& line, char delim) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delim) {
            std::string tok = trim(std::string_view(line).substr(start, i - start));
            if (!tok.empty()) tokens.push_back(std::move(tok));
            start = i + 1;
        }
    }
    return tokens;
}

bool skip_line(const std::string& line) {
    const std::string t = trim(line);
    return t.empty() || t[0] == '#';
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path.string());
    return in;
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw FormatError("expected a boolean for key '" + key + "', got '" + value + "'");
}

} // namespace

KeyValueFile KeyValueFile::parse(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    KeyValueFile kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skip_line(line)) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path.string(), lineno, "expected 'key = value'");
        }
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ParseError(path.string(), lineno, "empty key");
        kv.entries.emplace_back(std::move(key), std::move(value));
    }
    return kv;
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
    std::optional<std::string> found;
    for (const auto& [k, v] : entries) {
        if (k == key) found = v;
    }
    return found;
}

std::vector<std::string> KeyValueFile::get_all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries) {
        if (k == key) out.push_back(v);
    }
    return out;
}

DatasetManifest DatasetManifest::from_file(const std::filesystem::path& path) {
    const KeyValueFile kv = KeyValueFile::parse(path);
    const std::filesystem::path base = path.parent_path();

    static const std::set<std::string> known{"edge_file",      "directed",   "delimiter",
                                             "node_id_labels", "label_file", "class_file"};
    for (const auto& [k, v] : kv.entries) {
        if (!known.count(k)) throw FormatError("unknown manifest key '" + k + "' in " + path.string());
    }

    DatasetManifest m;
    const auto edge = kv.get("edge_file");
    if (!edge) throw FormatError("manifest " + path.string() + " is missing edge_file");
    m.edge_file = base / *edge;
    if (auto d = kv.get("directed")) m.directed = parse_bool(*d, "directed");
    if (auto d = kv.get("delimiter")) {
        if (*d == "tab") m.delimiter = '\t';
        else if (*d == "space") m.delimiter = ' ';
        else if (*d == "comma") m.delimiter = ',';
        else throw FormatError("delimiter must be tab, space or comma, got '" + *d + "'");
    }
    if (auto n = kv.get("node_id_labels")) m.node_id_labels = parse_bool(*n, "node_id_labels");
    for (const std::string& spec : kv.get_all("label_file")) {
        const auto colon = spec.find(':');
        if (colon == std::string::npos) {
            throw FormatError("label_file must be '<type name>:<path>', got '" + spec + "'");
        }
        m.label_files.emplace_back(trim(std::string_view(spec).substr(0, colon)),
                                   base / trim(std::string_view(spec).substr(colon + 1)));
    }
    if (auto c = kv.get("class_file")) m.class_file = base / *c;

    std::set<std::string> names;
    for (const auto& [name, file] : m.label_files) {
        if (!names.insert(name).second) throw FormatError("duplicate label type name: " + name);
        if (!std::filesystem::exists(file)) {
            throw std::invalid_argument("label file does not exist: " + file.string());
        }
    }
    if (m.node_id_labels && names.count(m.node_id_type_name)) {
        throw FormatError("label type name '" + m.node_id_type_name +
                          "' is reserved for the node identity type");
    }
    if (!std::filesystem::exists(m.edge_file)) {
        throw std::invalid_argument("edge file does not exist: " + m.edge_file.string());
    }
    if (!m.class_file.empty() && !std::filesystem::exists(m.class_file)) {
        throw std::invalid_argument("class file does not exist: " + m.class_file.string());
    }
    return m;
}

ParsedDataset load_dataset(const DatasetManifest& manifest) {
    std::vector<std::string> vertex_names;
    std::unordered_map<std::string, VertexId> vertex_ids;
    auto intern_vertex = [&](const std::string& name) {
        auto [it, inserted] = vertex_ids.try_emplace(name, static_cast<VertexId>(vertex_names.size()));
        if (inserted) vertex_names.push_back(name);
        return it->second;
    };

    std::vector<std::string> edge_type_names;
    std::unordered_map<std::string, EdgeTypeId> edge_type_ids;
    std::vector<Edge> edges;
    {
        std::ifstream in = open_or_throw(manifest.edge_file);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (skip_line(line)) continue;
            const auto tokens = split_on(line, manifest.delimiter);
            if (tokens.size() != 2 && tokens.size() != 3) {
                throw ParseError(manifest.edge_file.string(), lineno,
                                 "expected '<src><DELIM><dst>[<DELIM><edge_type>]'");
            }
            Edge e;
            e.src = intern_vertex(tokens[0]);
            e.dst = intern_vertex(tokens[1]);
            if (tokens.size() == 3) {
                auto [it, inserted] =
                    edge_type_ids.try_emplace(tokens[2], static_cast<EdgeTypeId>(edge_type_names.size()));
                if (inserted) edge_type_names.push_back(tokens[2]);
                e.type = it->second;
            }
            edges.push_back(e);
        }
    }
    const std::size_t n = vertex_names.size();

    LabelVocabulary vocab;
    LabelAssignments labels;
    if (manifest.node_id_labels) {
        const std::size_t t = vocab.add_type(manifest.node_id_type_name);
        labels.emplace_back(n);
        for (std::size_t v = 0; v < n; ++v) {
            labels[t][v].push_back(vocab.add_label(t, vertex_names[v]));
        }
    }
    for (const auto& [type_name, file] : manifest.label_files) {
        const std::size_t t = vocab.add_type(type_name);
        labels.emplace_back(n);
        std::ifstream in = open_or_throw(file);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (skip_line(line)) continue;
            const auto tokens = split_on(line, manifest.delimiter);
            if (tokens.size() < 2) {
                throw ParseError(file.string(), lineno,
                                 "expected '<vertex><DELIM><label>...' with at least one label");
            }
            const auto vit = vertex_ids.find(tokens[0]);
            if (vit == vertex_ids.end()) {
                throw ParseError(file.string(), lineno,
                                 "unknown vertex '" + tokens[0] + "' (not present in the edge file)");
            }
            auto& ls = labels[t][vit->second];
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                const LabelIndex l = vocab.add_label(t, tokens[i]);
                // Bag-of-words multiplicities collapse to a set.
                if (std::find(ls.begin(), ls.end(), l) == ls.end()) ls.push_back(l);
            }
        }
    }

    ClassLabels classes(n);
    std::vector<std::string> class_names;
    std::unordered_map<std::string, int> class_ids;
    if (!manifest.class_file.empty()) {
        std::ifstream in = open_or_throw(manifest.class_file);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (skip_line(line)) continue;
            const auto tokens = split_on(line, manifest.delimiter);
            if (tokens.size() != 2) {
                throw ParseError(manifest.class_file.string(), lineno,
                                 "expected '<vertex><DELIM><class>[,<class>...]'");
            }
            const auto vit = vertex_ids.find(tokens[0]);
            if (vit == vertex_ids.end()) {
                throw ParseError(manifest.class_file.string(), lineno,
                                 "unknown vertex '" + tokens[0] + "' (not present in the edge file)");
            }
            for (const std::string& cls : split_on(tokens[1], ',')) {
                auto [it, inserted] =
                    class_ids.try_emplace(cls, static_cast<int>(class_names.size()));
                if (inserted) class_names.push_back(cls);
                auto& cs = classes[vit->second];
                if (std::find(cs.begin(), cs.end(), it->second) == cs.end()) {
                    cs.push_back(it->second);
                }
            }
        }
        for (auto& cs : classes) std::sort(cs.begin(), cs.end());
    }

    LabeledGraph graph(n, std::move(edges), manifest.directed, std::move(labels));

    ParsedDataset ds{std::move(graph),        std::move(vocab),      std::move(classes),
                     std::move(vertex_names), std::move(vertex_ids), std::move(class_names),
                     std::move(edge_type_names), manifest.node_id_labels,
                     LoadStats{}};
    ds.stats.vertices = ds.graph.num_vertices();
    ds.stats.edges = ds.graph.num_edges();
    ds.stats.dropped_duplicate_edges = ds.graph.dropped_duplicate_edges();
    ds.stats.dropped_self_loops = ds.graph.dropped_self_loops();
    ds.stats.num_classes = ds.class_names.size();
    for (std::size_t t = 0; t < ds.vocab.num_types(); ++t) {
        ds.stats.labels_per_type.emplace_back(ds.vocab.type_name(t), ds.vocab.size(t));
    }
    return ds;
}

DatasetManifest save_dataset(const ParsedDataset& dataset, const std::filesystem::path& directory,
                             const std::string& stem) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);

    const fs::path edge_path = directory / (stem + ".edges");
    {
        std::ofstream out(edge_path);
        for (const Edge& e : dataset.graph.edges()) {
            out << dataset.vertex_names[e.src] << '\t' << dataset.vertex_names[e.dst];
            if (e.type != kNoEdgeType) out << '\t' << dataset.edge_type_names[e.type];
            out << '\n';
        }
    }

    DatasetManifest m;
    m.edge_file = edge_path;
    m.directed = dataset.graph.directed();
    m.node_id_labels = dataset.has_node_id_type;

    std::ofstream manifest_out(directory / (stem + ".manifest"));
    manifest_out << "edge_file = " << stem << ".edges\n";
    manifest_out << "directed = " << (m.directed ? "true" : "false") << "\n";
    manifest_out << "node_id_labels = " << (m.node_id_labels ? "true" : "false") << "\n";

    const std::size_t first_type = dataset.has_node_id_type ? 1 : 0;
    for (std::size_t t = first_type; t < dataset.vocab.num_types(); ++t) {
        const std::string& type_name = dataset.vocab.type_name(t);
        const fs::path label_path = directory / (stem + "." + type_name);
        std::ofstream out(label_path);
        for (std::size_t v = 0; v < dataset.graph.num_vertices(); ++v) {
            const auto ls = dataset.graph.labels(static_cast<VertexId>(v), t);
            if (ls.empty()) continue;
            out << dataset.vertex_names[v];
            for (LabelIndex l : ls) out << '\t' << dataset.vocab.label_name(t, l);
            out << '\n';
        }
        m.label_files.emplace_back(type_name, label_path);
        manifest_out << "label_file = " << type_name << ":" << stem << "." << type_name << "\n";
    }

    bool any_class = false;
    for (const auto& cs : dataset.classes) any_class |= !cs.empty();
    if (any_class) {
        const fs::path class_path = directory / (stem + ".classes");
        std::ofstream out(class_path);
        for (std::size_t v = 0; v < dataset.classes.size(); ++v) {
            if (dataset.classes[v].empty()) continue;
            out << dataset.vertex_names[v] << '\t';
            for (std::size_t i = 0; i < dataset.classes[v].size(); ++i) {
                if (i) out << ',';
                out << dataset.class_names[dataset.classes[v][i]];
            }
            out << '\n';
        }
        m.class_file = class_path;
        manifest_out << "class_file = " << stem << ".classes\n";
    }
    return m;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw FormatError("cannot parse floating point value '" + std::string(text) + "'");
    }
    return value;
}

void save_embeddings(const std::filesystem::path& path, std::span<const std::string> ids,
                     const Matrix& values) {
    if (ids.size() != values.rows) throw ShapeError("save_embeddings: id/row count mismatch");
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path.string());
    out << values.rows << ' ' << values.cols << '\n';
    for (std::size_t i = 0; i < values.rows; ++i) {
        out << ids[i];
        for (double x : values.row(i)) out << ' ' << format_double(x);
        out << '\n';
    }
}

std::pair<std::vector<std::string>, Matrix> load_embeddings(const std::filesystem::path& path) {
    std::ifstream in = open_or_throw(path);
    std::string header;
    if (!std::getline(in, header)) throw FormatError("empty embedding file: " + path.string());
    std::istringstream hs(header);
    std::size_t rows = 0, cols = 0;
    if (!(hs >> rows >> cols)) {
        throw FormatError("bad embedding header in " + path.string() + ": '" + header + "'");
    }

    std::vector<std::string> ids;
    ids.reserve(rows);
    Matrix values(rows, cols);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        if (row >= rows) throw FormatError(path.string() + ": more rows than the header declares");
        std::istringstream ls(line);
        std::string id;
        ls >> id;
        ids.push_back(id);
        auto dst = values.row(row);
        std::string tok;
        std::size_t col = 0;
        while (ls >> tok) {
            if (col >= cols) {
                throw FormatError(path.string() + ": row " + std::to_string(row) +
                                  " has more than " + std::to_string(cols) + " values");
            }
            dst[col++] = parse_double(tok);
        }
        if (col != cols) {
            throw FormatError(path.string() + ": row " + std::to_string(row) + " has " +
                              std::to_string(col) + " values, expected " + std::to_string(cols));
        }
        ++row;
    }
    if (row != rows) {
        throw FormatError(path.string() + ": header declares " + std::to_string(rows) +
                          " rows but " + std::to_string(row) + " were found");
    }
    return {std::move(ids), std::move(values)};
}

void save_split(const std::filesystem::path& path, const Split& split) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path.string());
    for (VertexId v : split.train) out << v << "\ttrain\n";
    for (VertexId v : split.test) out << v << "\ttest\n";
    for (VertexId v : split.validation) out << v << "\tval\n";
}

void save_metrics(const std::filesystem::path& path, const MetricsSummary& summary) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path.string());
    for (std::size_t i = 0; i < summary.runs.size(); ++i) {
        const Metrics& m = summary.runs[i];
        out << i << '\t' << format_double(m.accuracy) << '\t' << format_double(m.micro_f1) << '\t'
            << format_double(m.macro_f1) << '\n';
    }
    out << "summary\t" << format_double(summary.mean.accuracy) << "±"
        << format_double(summary.stddev.accuracy) << '\t' << format_double(summary.mean.micro_f1)
        << "±" << format_double(summary.stddev.micro_f1) << '\t'
        << format_double(summary.mean.macro_f1) << "±" << format_double(summary.stddev.macro_f1)
        << '\n';
}

void save_loss_curve(const std::filesystem::path& path, std::span<const LossReport> reports) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path.string());
    for (const LossReport& r : reports) {
        out << r.epoch << '\t' << format_double(r.mean_batch_loss) << '\t'
            << format_double(r.wall_time_seconds) << '\n';
    }
}

InductiveSplit remove_nodes_for_inductive(const ParsedDataset& dataset,
                                          std::span<const VertexId> remove) {
    const std::size_t n = dataset.graph.num_vertices();
    for (std::size_t t = 0; t < dataset.vocab.num_types(); ++t) {
        if (dataset.vocab.num_dummy(t) > 0) {
            throw std::invalid_argument(
                "remove_nodes_for_inductive expects a dataset without dummy labels");
        }
    }
    std::vector<bool> removed(n, false);
    for (VertexId v : remove) {
        if (v >= n) throw std::out_of_range("removal id " + std::to_string(v) + " out of range");
        removed[v] = true;
    }
    std::size_t removed_count = 0;
    for (bool r : removed) removed_count += r;
    if (removed_count == n) throw InvalidSplitError("cannot remove every vertex");

    InductiveSplit result{ParsedDataset{LabeledGraph(0, {}, dataset.graph.directed(), {}),
                                        LabelVocabulary{}, {}, {}, {}, {}, {}, false, LoadStats{}},
                          {}};

    // Held-out side first: labels, classes and the original neighbor list.
    for (std::size_t v = 0; v < n; ++v) {
        if (!removed[v]) continue;
        HeldOutNode node;
        node.name = dataset.vertex_names[v];
        node.classes = dataset.classes[v];
        node.labels_by_type.resize(dataset.vocab.num_types());
        for (std::size_t t = 0; t < dataset.vocab.num_types(); ++t) {
            for (LabelIndex l : dataset.graph.labels(static_cast<VertexId>(v), t)) {
                node.labels_by_type[t].push_back(dataset.vocab.label_name(t, l));
            }
        }
        for (VertexId u : dataset.graph.neighbors(static_cast<VertexId>(v))) {
            node.neighbors.push_back(dataset.vertex_names[u]);
        }
        result.held_out.push_back(std::move(node));
    }

    // Training side: dense re-index in ascending kept order, vocabulary
    // rebuilt so tables later match exactly what is trainable.
    std::vector<VertexId> new_id(n, 0);
    ParsedDataset& train = result.training;
    for (std::size_t v = 0; v < n; ++v) {
        if (removed[v]) continue;
        new_id[v] = static_cast<VertexId>(train.vertex_names.size());
        train.vertex_ids.emplace(dataset.vertex_names[v], new_id[v]);
        train.vertex_names.push_back(dataset.vertex_names[v]);
        train.classes.push_back(dataset.classes[v]);
    }
    const std::size_t kept = train.vertex_names.size();

    std::vector<Edge> kept_edges;
    for (const Edge& e : dataset.graph.edges()) {
        if (removed[e.src] || removed[e.dst]) continue;
        kept_edges.push_back(Edge{new_id[e.src], new_id[e.dst], e.type});
    }

    LabelAssignments labels;
    for (std::size_t t = 0; t < dataset.vocab.num_types(); ++t) {
        train.vocab.add_type(dataset.vocab.type_name(t));
        labels.emplace_back(kept);
        for (std::size_t v = 0; v < n; ++v) {
            if (removed[v]) continue;
            for (LabelIndex l : dataset.graph.labels(static_cast<VertexId>(v), t)) {
                labels[t][new_id[v]].push_back(
                    train.vocab.add_label(t, dataset.vocab.label_name(t, l)));
            }
        }
    }

    train.graph = LabeledGraph(kept, std::move(kept_edges), dataset.graph.directed(),
                               std::move(labels));
    train.class_names = dataset.class_names;
    train.edge_type_names = dataset.edge_type_names;
    train.has_node_id_type = dataset.has_node_id_type;
    train.stats.vertices = train.graph.num_vertices();
    train.stats.edges = train.graph.num_edges();
    train.stats.num_classes = train.class_names.size();
    for (std::size_t t = 0; t < train.vocab.num_types(); ++t) {
        train.stats.labels_per_type.emplace_back(train.vocab.type_name(t), train.vocab.size(t));
    }
    return result;
}

std::vector<HeldOutNode> load_new_node_spec(const std::filesystem::path& path,
                                            std::span<const std::string> type_names,
                                            char delimiter) {
    std::ifstream in = open_or_throw(path);
    std::vector<HeldOutNode> nodes;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (skip_line(line)) continue;
        const auto tokens = split_on(line, delimiter);
        if (tokens.size() < 2) {
            throw ParseError(path.string(), lineno, "expected '<name><DELIM><neighbor,...>'");
        }
        HeldOutNode node;
        node.name = tokens[0];
        node.neighbors = split_on(tokens[1], ',');
        node.labels_by_type.resize(type_names.size());
        for (std::size_t i = 2; i < tokens.size(); ++i) {
            const auto colon = tokens[i].find(':');
            if (colon == std::string::npos) {
                throw ParseError(path.string(), lineno,
                                 "label field must be '<type name>:<label,...>'");
            }
            const std::string type_name = tokens[i].substr(0, colon);
            const auto it = std::find(type_names.begin(), type_names.end(), type_name);
            if (it == type_names.end()) {
                throw ParseError(path.string(), lineno, "unknown label type '" + type_name + "'");
            }
            const std::size_t t = static_cast<std::size_t>(it - type_names.begin());
            for (std::string& l : split_on(tokens[i].substr(colon + 1), ',')) {
                node.labels_by_type[t].push_back(std::move(l));
            }
        }
        nodes.push_back(std::move(node));
    }
    return nodes;
}

InductiveSplit remove_nodes_for_inductive(const ParsedDataset& dataset, double fraction,
                                          std::uint64_t seed) {
    if (!(fraction > 0.0) || !(fraction < 1.0)) {
        throw InvalidSplitError("removal fraction must lie strictly between 0 and 1");
    }
    const std::size_t n = dataset.graph.num_vertices();
    const std::size_t count = static_cast<std::size_t>(fraction * static_cast<double>(n));
    if (count == 0) throw InvalidSplitError("removal fraction selects no vertices");
    std::vector<VertexId> pool(n);
    for (std::size_t v = 0; v < n; ++v) pool[v] = static_cast<VertexId>(v);
    Rng rng = make_substream(seed, "inductive-removal");
    shuffle_in_place(pool, rng);
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return remove_nodes_for_inductive(dataset, pool);
}

} // namespace ep
