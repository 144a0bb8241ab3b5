#include "coniwave/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace coniwave {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : f_(nullptr), cols_(header.size()) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("CsvWriter: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        std::fprintf(f, "%s%s", header[i].c_str(), i + 1 < header.size() ? "," : "\n");
    f_ = f;
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != cols_)
        throw std::runtime_error("CsvWriter: row width does not match the header");
    std::FILE* f = static_cast<std::FILE*>(f_);
    for (std::size_t i = 0; i < values.size(); ++i)
        std::fprintf(f, "%.17g%s", values[i], i + 1 < values.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() {
    if (f_) std::fclose(static_cast<std::FILE*>(f_));
}

namespace {

void write_complex_block(std::FILE* f, const std::vector<cplx>& v) {
    // little-endian doubles; x86 is little-endian, written as-is
    for (const cplx& z : v) {
        double re = z.real(), im = z.imag();
        std::fwrite(&re, sizeof(double), 1, f);
        std::fwrite(&im, sizeof(double), 1, f);
    }
}

nlohmann::json sidecar_common(const BoxSpec& box, double time) {
    nlohmann::json j;
    j["dims"] = box.d;
    j["L"] = box.L;
    j["N"] = box.n;
    j["time"] = time;
    return j;
}

} // namespace

void dump_profile(const std::string& path_base, const ProfileGrid& g) {
    std::FILE* f = std::fopen((path_base + ".bin").c_str(), "wb");
    if (!f) throw std::runtime_error("dump_profile: cannot open " + path_base + ".bin");
    write_complex_block(f, g.v);
    std::fclose(f);

    nlohmann::json j = sidecar_common(g.box, g.time);
    j["mode"] = mode_name(g.mode);
    j["components"] = 1;
    std::ofstream side(path_base + ".json");
    side << j.dump(2) << "\n";
}

void dump_field(const std::string& path_base, const Field2& fl, double time) {
    std::FILE* f = std::fopen((path_base + ".bin").c_str(), "wb");
    if (!f) throw std::runtime_error("dump_field: cannot open " + path_base + ".bin");
    // two components interleaved point by point
    for (std::size_t i = 0; i < fl.c1.v.size(); ++i) {
        double vals[4] = {fl.c1.v[i].real(), fl.c1.v[i].imag(), fl.c2.v[i].real(),
                          fl.c2.v[i].imag()};
        std::fwrite(vals, sizeof(double), 4, f);
    }
    std::fclose(f);

    nlohmann::json j = sidecar_common(fl.grid.box, time);
    j["components"] = 2;
    j["epsilon"] = fl.grid.epsilon;
    std::ofstream side(path_base + ".json");
    side << j.dump(2) << "\n";
}

ProfileGrid load_profile(const std::string& path_base) {
    std::ifstream side(path_base + ".json");
    if (!side) throw std::runtime_error("load_profile: cannot open " + path_base + ".json");
    nlohmann::json j;
    side >> j;
    BoxSpec box{j.at("dims").get<int>(), j.at("N").get<int>(), j.at("L").get<double>()};
    ProfileGrid g(box);
    g.time = j.at("time").get<double>();
    std::string mode = j.value("mode", "reference");
    g.mode = mode == "plus" ? Mode::plus : (mode == "minus" ? Mode::minus : Mode::reference);

    std::FILE* f = std::fopen((path_base + ".bin").c_str(), "rb");
    if (!f) throw std::runtime_error("load_profile: cannot open " + path_base + ".bin");
    for (cplx& z : g.v) {
        double re = 0, im = 0;
        if (std::fread(&re, sizeof(double), 1, f) != 1 ||
            std::fread(&im, sizeof(double), 1, f) != 1) {
            std::fclose(f);
            throw std::runtime_error("load_profile: short read in " + path_base + ".bin");
        }
        z = cplx(re, im);
    }
    std::fclose(f);
    return g;
}

} // namespace coniwave
