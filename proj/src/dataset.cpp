#include "gauss/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "gauss/errors.hpp"
#include "gauss/rng.hpp"

namespace gauss {

namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

// Reads a whole file through zlib's gz layer, which passes uncompressed
// bytes through unchanged and inflates gzip payloads (magic 0x1f 0x8b).
std::vector<unsigned char> read_file_auto(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        throw DataError("dataset file not found: " + path);
    }
    gzFile f = gzopen(path.c_str(), "rb");
    if (f == nullptr) {
        throw DataError("cannot open dataset file: " + path);
    }
    std::vector<unsigned char> out;
    unsigned char buf[1 << 16];
    int n = 0;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) {
        out.insert(out.end(), buf, buf + n);
    }
    bool ok = (n == 0);
    gzclose(f);
    if (!ok) {
        throw DataError("read error (possibly corrupt gzip stream): " + path);
    }
    return out;
}

std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t offset,
                        const std::string& path) {
    if (offset + 4 > buf.size()) {
        std::ostringstream msg;
        msg << "truncated payload in " << path << ": need 4 bytes at offset " << offset
            << ", file has " << buf.size();
        throw DataError(msg.str());
    }
    return (std::uint32_t(buf[offset]) << 24) | (std::uint32_t(buf[offset + 1]) << 16) |
           (std::uint32_t(buf[offset + 2]) << 8) | std::uint32_t(buf[offset + 3]);
}

void check_magic(std::uint32_t got, std::uint32_t want, const std::string& path) {
    if (got != want) {
        std::ostringstream msg;
        msg << "bad magic in " << path << " at byte offset 0: got 0x" << std::hex << got
            << ", expected 0x" << want;
        throw DataError(msg.str());
    }
}

std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t>& from,
                                                  std::size_t k, std::mt19937_64& rng) {
    // Partial Fisher-Yates on `from`; removes and returns k elements, sorted.
    std::vector<std::size_t> picked;
    picked.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> dist(0, from.size() - 1);
        std::size_t j = dist(rng);
        picked.push_back(from[j]);
        from[j] = from.back();
        from.pop_back();
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

}  // namespace

Matrix Dataset::gather(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), feature_dim);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        auto src = row(indices[r]);
        auto dst = out.row(r);
        for (std::size_t c = 0; c < feature_dim; ++c) dst[c] = src[c];
    }
    return out;
}

std::vector<int> Dataset::gather_labels(std::span<const std::size_t> indices) const {
    std::vector<int> out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) out[i] = labels[indices[i]];
    return out;
}

std::uint64_t Dataset::content_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    std::uint64_t dims[2] = {feature_dim, num_classes};
    mix(dims, sizeof(dims));
    mix(features.data(), features.size() * sizeof(float));
    mix(labels.data(), labels.size() * sizeof(int));
    mix(outlier_flags.data(), outlier_flags.size());
    return h;
}

LabelOracle::LabelOracle(const Dataset& source)
    : source_(&source), revealed_(source.size(), 0) {}

std::vector<int> LabelOracle::reveal(std::span<const std::size_t> indices) {
    std::vector<int> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= source_->size()) {
            throw DataError("reveal index out of range: " + std::to_string(i));
        }
        revealed_[i] = 1;
        out.push_back(source_->labels[i]);
    }
    return out;
}

void LabelOracle::mark_revealed(std::span<const std::size_t> indices) {
    for (std::size_t i : indices) {
        if (i >= source_->size()) {
            throw DataError("reveal index out of range: " + std::to_string(i));
        }
        revealed_[i] = 1;
    }
}

int LabelOracle::label(std::size_t index) const {
    if (index >= source_->size() || !revealed_[index]) {
        throw DataError("label read before reveal: sample " + std::to_string(index));
    }
    return source_->labels[index];
}

bool LabelOracle::is_revealed(std::size_t index) const {
    return index < revealed_.size() && revealed_[index] != 0;
}

std::vector<int> LabelOracle::labels_for(std::span<const std::size_t> indices) const {
    std::vector<int> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(label(i));
    return out;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    auto img = read_file_auto(images_path);
    auto lab = read_file_auto(labels_path);

    check_magic(read_be32(img, 0, images_path), kIdxImagesMagic, images_path);
    check_magic(read_be32(lab, 0, labels_path), kIdxLabelsMagic, labels_path);

    const std::uint32_t n_images = read_be32(img, 4, images_path);
    const std::uint32_t n_rows = read_be32(img, 8, images_path);
    const std::uint32_t n_cols = read_be32(img, 12, images_path);
    const std::uint32_t n_labels = read_be32(lab, 4, labels_path);

    if (n_images != n_labels) {
        std::ostringstream msg;
        msg << "count mismatch: " << images_path << " has " << n_images << " images, "
            << labels_path << " has " << n_labels << " labels";
        throw DataError(msg.str());
    }

    const std::size_t dim = std::size_t(n_rows) * n_cols;
    const std::size_t img_payload = std::size_t(n_images) * dim;
    if (img.size() != 16 + img_payload) {
        std::ostringstream msg;
        msg << "truncated payload in " << images_path << ": expected " << 16 + img_payload
            << " bytes, got " << img.size() << " (payload starts at offset 16)";
        throw DataError(msg.str());
    }
    if (lab.size() != 8 + n_labels) {
        std::ostringstream msg;
        msg << "truncated payload in " << labels_path << ": expected " << 8 + n_labels
            << " bytes, got " << lab.size() << " (payload starts at offset 8)";
        throw DataError(msg.str());
    }

    Dataset ds;
    ds.feature_dim = dim;
    ds.features.resize(img_payload);
    for (std::size_t i = 0; i < img_payload; ++i) {
        ds.features[i] = float(img[16 + i]) / 255.0f;
    }
    ds.labels.resize(n_labels);
    int max_label = 0;
    for (std::size_t i = 0; i < n_labels; ++i) {
        ds.labels[i] = int(lab[8 + i]);
        max_label = std::max(max_label, ds.labels[i]);
    }
    ds.num_classes = std::size_t(max_label) + 1;
    return ds;
}

Dataset load_csv(const std::string& path, std::size_t label_column) {
    auto raw = read_file_auto(path);
    std::string text(raw.begin(), raw.end());
    std::istringstream in(text);

    Dataset ds;
    std::string line;
    std::size_t row_no = 0;
    std::size_t n_cols = 0;
    int max_label = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row_no;
        std::vector<double> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t pos = 0;
                double v = std::stod(cell, &pos);
                while (pos < cell.size() && std::isspace((unsigned char)cell[pos])) ++pos;
                if (pos != cell.size()) throw std::invalid_argument(cell);
                cells.push_back(v);
            } catch (const std::exception&) {
                throw DataError("non-numeric cell '" + cell + "' in " + path + " row " +
                                std::to_string(row_no));
            }
        }
        if (n_cols == 0) {
            n_cols = cells.size();
            if (label_column >= n_cols) {
                throw DataError("label column " + std::to_string(label_column) +
                                " out of range; file has " + std::to_string(n_cols) +
                                " columns");
            }
            ds.feature_dim = n_cols - 1;
        } else if (cells.size() != n_cols) {
            throw DataError("ragged row " + std::to_string(row_no) + " in " + path + ": " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(n_cols));
        }
        double label_val = cells[label_column];
        if (label_val < 0 || label_val != std::floor(label_val)) {
            throw DataError("negative or non-integer label in " + path + " row " +
                            std::to_string(row_no));
        }
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (c != label_column) ds.features.push_back(float(cells[c]));
        }
        ds.labels.push_back(int(label_val));
        max_label = std::max(max_label, ds.labels.back());
    }
    if (ds.labels.empty()) throw DataError("no rows in " + path);
    ds.num_classes = std::size_t(max_label) + 1;
    return ds;
}

Dataset synth_blobs(std::size_t num_classes, std::size_t per_class,
                    std::size_t feature_dim, double spread, double outlier_fraction,
                    std::uint64_t seed) {
    if (num_classes < 2) throw DataError("synth_blobs: need at least 2 classes");
    if (per_class < 1) throw DataError("synth_blobs: need at least 1 sample per class");
    if (outlier_fraction < 0.0 || outlier_fraction > 1.0) {
        throw DataError("synth_blobs: outlier_fraction must be in [0,1]");
    }

    const std::size_t n = num_classes * per_class;
    Dataset ds;
    ds.num_classes = num_classes;
    ds.feature_dim = feature_dim;
    ds.features.resize(n * feature_dim);
    ds.labels.resize(n);
    ds.outlier_flags.assign(n, 0);

    auto rng = make_engine(seed);
    std::normal_distribution<double> noise(0.0, spread);

    // Class centers sit on unit-hypercube corners scaled by 10; classes past
    // 2^feature_dim wrap onto earlier corners.
    for (std::size_t c = 0; c < num_classes; ++c) {
        for (std::size_t j = 0; j < per_class; ++j) {
            const std::size_t i = c * per_class + j;
            ds.labels[i] = int(c);
            for (std::size_t d = 0; d < feature_dim; ++d) {
                double center = (d < 63 && ((c >> d) & 1u)) ? 10.0 : 0.0;
                ds.features[i * feature_dim + d] = float(center + noise(rng));
            }
        }
    }

    // Relabel a random subset of each class (exactly floor(fraction*per_class)
    // samples) to a uniformly chosen different class.
    const std::size_t flips = std::size_t(std::floor(outlier_fraction * double(per_class)));
    for (std::size_t c = 0; c < num_classes; ++c) {
        std::vector<std::size_t> members(per_class);
        for (std::size_t j = 0; j < per_class; ++j) members[j] = c * per_class + j;
        for (std::size_t j = 0; j < flips; ++j) {
            std::uniform_int_distribution<std::size_t> pick(j, members.size() - 1);
            std::swap(members[j], members[pick(rng)]);
            const std::size_t i = members[j];
            std::uniform_int_distribution<std::size_t> other(0, num_classes - 2);
            std::size_t wrong = other(rng);
            if (wrong >= c) ++wrong;
            ds.labels[i] = int(wrong);
            ds.outlier_flags[i] = 1;
        }
    }
    return ds;
}

PoolPartition split_initial(const Dataset& dataset, std::size_t initial_train,
                            double test_fraction, std::uint64_t seed) {
    const std::size_t n = dataset.size();
    const std::size_t test_count =
        std::size_t(std::llround(test_fraction * double(n)));
    if (test_count >= n || initial_train + 1 > n - test_count) {
        throw DataError("split_initial: train budget " + std::to_string(initial_train) +
                        " + test " + std::to_string(test_count) + " exceeds " +
                        std::to_string(n) + " samples");
    }

    std::vector<std::size_t> remaining(n);
    std::iota(remaining.begin(), remaining.end(), 0);
    auto rng = make_engine(seed);

    PoolPartition part;
    part.test_idx = draw_without_replacement(remaining, test_count, rng);
    part.train_idx = draw_without_replacement(remaining, initial_train, rng);
    std::sort(remaining.begin(), remaining.end());
    part.pool_idx = std::move(remaining);
    return part;
}

PoolPartition split_with_fixed_test(const Dataset& dataset, std::size_t initial_train,
                                    std::size_t fixed_test_count, std::uint64_t seed) {
    const std::size_t n = dataset.size();
    if (fixed_test_count >= n || initial_train + 1 > n - fixed_test_count) {
        throw DataError("split_with_fixed_test: train budget exceeds available samples");
    }
    const std::size_t n_train_block = n - fixed_test_count;

    std::vector<std::size_t> remaining(n_train_block);
    std::iota(remaining.begin(), remaining.end(), 0);
    auto rng = make_engine(seed);

    PoolPartition part;
    part.test_idx.resize(fixed_test_count);
    std::iota(part.test_idx.begin(), part.test_idx.end(), n_train_block);
    part.train_idx = draw_without_replacement(remaining, initial_train, rng);
    std::sort(remaining.begin(), remaining.end());
    part.pool_idx = std::move(remaining);
    return part;
}

Dataset concat_datasets(const Dataset& a, const Dataset& b) {
    if (a.feature_dim != b.feature_dim) {
        throw DataError("concat_datasets: feature_dim mismatch");
    }
    Dataset out = a;
    out.features.insert(out.features.end(), b.features.begin(), b.features.end());
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    out.num_classes = std::max(a.num_classes, b.num_classes);
    if (!a.outlier_flags.empty() || !b.outlier_flags.empty()) {
        out.outlier_flags.resize(a.size(), 0);
        if (b.outlier_flags.empty()) {
            out.outlier_flags.resize(a.size() + b.size(), 0);
        } else {
            out.outlier_flags.insert(out.outlier_flags.end(), b.outlier_flags.begin(),
                                     b.outlier_flags.end());
        }
    }
    return out;
}

}  // namespace gauss
