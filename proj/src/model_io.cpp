#include "mdqda/model_io.hpp"

#include "mdqda/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <vector>

namespace mdqda {

using nlohmann::json;

namespace {

std::vector<double> packed_lower(const Matrix& l) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(l.rows() * (l.rows() + 1) / 2));
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        for (Eigen::Index j = 0; j <= i; ++j) out.push_back(l(i, j));
    return out;
}

Matrix unpack_lower(const std::vector<double>& packed, std::size_t p) {
    if (packed.size() != p * (p + 1) / 2) throw ValidationError("model: Cholesky triangle has wrong length");
    const auto pi = static_cast<Eigen::Index>(p);
    Matrix l = Matrix::Zero(pi, pi);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < pi; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) l(i, j) = packed[k++];
    return l;
}

Vector to_vector(const std::vector<double>& v, std::size_t p, const char* field) {
    if (v.size() != p) throw ValidationError(std::string("model: field '") + field + "' has wrong length");
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string save_model(const FittedQda& model) {
    const auto& c1 = model.class1();
    const auto& c2 = model.class2();
    const auto& k = model.constants();
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["p"] = model.dim();
    doc["n1"] = c1.n;
    doc["n2"] = c2.n;
    doc["variant"] = std::string(to_string(model.variant()));
    doc["mean1"] = std::vector<double>(c1.mean.begin(), c1.mean.end());
    doc["mean2"] = std::vector<double>(c2.mean.begin(), c2.mean.end());
    doc["chol1"] = packed_lower(c1.chol.lower());
    doc["chol2"] = packed_lower(c2.chol.lower());
    doc["logdet1"] = c1.chol.log_det();
    doc["logdet2"] = c2.chol.log_det();
    doc["s0n"] = k.s0n;
    doc["m0n"] = k.m0n;
    doc["l1n"] = k.l1n;
    doc["l2n"] = k.l2n;
    return doc.dump(2);
}

FittedQda load_model(std::string_view document) {
    try {
        const json doc = json::parse(document);
        const int version = doc.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw ValidationError("model: unsupported format_version " + std::to_string(version));
        }
        const auto p = doc.at("p").get<std::size_t>();
        ClassFit c1;
        ClassFit c2;
        c1.n = doc.at("n1").get<std::size_t>();
        c2.n = doc.at("n2").get<std::size_t>();
        c1.mean = to_vector(doc.at("mean1").get<std::vector<double>>(), p, "mean1");
        c2.mean = to_vector(doc.at("mean2").get<std::vector<double>>(), p, "mean2");
        c1.chol = CholFactor(unpack_lower(doc.at("chol1").get<std::vector<double>>(), p),
                             doc.at("logdet1").get<double>());
        c2.chol = CholFactor(unpack_lower(doc.at("chol2").get<std::vector<double>>(), p),
                             doc.at("logdet2").get<double>());
        CorrectionConstants k{doc.at("s0n").get<double>(), doc.at("m0n").get<double>(),
                              doc.at("l1n").get<double>(), doc.at("l2n").get<double>()};
        return FittedQda(std::move(c1), std::move(c2), k, parse_variant(doc.at("variant").get<std::string>()));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model: ") + e.what());
    }
}

void save_model_file(const FittedQda& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << save_model(model) << '\n';
}

FittedQda load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_model(buf.str());
}

}  // namespace mdqda
