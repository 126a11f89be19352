#include "entrain/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "entrain/error.hpp"

namespace entrain {

namespace {

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw Error(ErrorKind::InvalidArgument, std::string("missing numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

std::vector<double> numbers(const json& j, const char* key) {
    if (!j.contains(key)) return {};
    if (!j.at(key).is_array()) throw Error(ErrorKind::InvalidArgument, std::string("field '") + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : j.at(key)) {
        if (!x.is_number()) throw Error(ErrorKind::InvalidArgument, std::string("non-numeric entry in '") + key + "'");
        out.push_back(x.get<double>());
    }
    return out;
}

HhParameters hh_params(const std::map<std::string, double>& p) {
    HhParameters h;
    std::map<std::string, double*> slots{{"V_Na", &h.V_Na}, {"V_K", &h.V_K}, {"V_L", &h.V_L}, {"g_Na", &h.g_Na},
                                         {"g_K", &h.g_K},   {"g_L", &h.g_L}, {"I_b", &h.I_b}, {"c", &h.c}};
    for (const auto& [k, v] : p) {
        auto it = slots.find(k);
        if (it == slots.end()) throw Error(ErrorKind::InvalidArgument, "unknown Hodgkin-Huxley parameter '" + k + "'");
        *it->second = v;
    }
    return h;
}

}  // namespace

VectorField ModelConfig::field() const {
    if (model == "hodgkin-huxley") return hh_field(hh_params(params));
    if (model == "planar-normal-form") {
        if (!params.empty()) throw Error(ErrorKind::InvalidArgument, "planar-normal-form takes no parameters");
        return planar_normal_form();
    }
    throw Error(ErrorKind::InvalidArgument, "unknown model '" + model + "'");
}

State ModelConfig::initial_state() const {
    if (model == "planar-normal-form") return {0.5, 0.0};
    return {-65.0, 0.05, 0.6, 0.32};
}

LimitCycleOptions ModelConfig::cycle_options() const {
    LimitCycleOptions o;
    o.dt = dt;
    o.settle_periods = settle_periods;
    o.resolution = resolution;
    return o;
}

std::vector<std::string> ModelConfig::column_names() const {
    if (model == "hodgkin-huxley") return {"V", "m", "h", "n"};
    return {"x1", "x2"};
}

ModelConfig model_config_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "model configuration must be a JSON object");
    ModelConfig c;
    if (j.contains("model")) {
        if (!j.at("model").is_string()) throw Error(ErrorKind::InvalidArgument, "'model' must be a string");
        c.model = j.at("model").get<std::string>();
    }
    if (j.contains("params")) {
        if (!j.at("params").is_object()) throw Error(ErrorKind::InvalidArgument, "'params' must be an object");
        for (const auto& [k, v] : j.at("params").items()) {
            if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, "parameter '" + k + "' must be numeric");
            c.params[k] = v.get<double>();
        }
    }
    if (j.contains("dt")) c.dt = number(j, "dt");
    if (j.contains("settle_periods")) c.settle_periods = number(j, "settle_periods");
    if (j.contains("resolution")) {
        if (!j.at("resolution").is_number_integer()) {
            throw Error(ErrorKind::InvalidArgument, "'resolution' must be an integer");
        }
        c.resolution = j.at("resolution").get<int>();
    }
    if (!(c.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
    if (!(c.settle_periods >= 0.0)) throw Error(ErrorKind::InvalidArgument, "settle_periods must be nonnegative");
    if (c.resolution < 16) throw Error(ErrorKind::InvalidArgument, "resolution must be at least 16");
    (void)c.field();  // validates model name and parameters
    return c;
}

json to_json(const ModelConfig& c) {
    json p = json::object();
    for (const auto& [k, v] : c.params) p[k] = v;
    return {{"model", c.model}, {"params", p}, {"dt", c.dt}, {"settle_periods", c.settle_periods},
            {"resolution", c.resolution}};
}

json to_json(const FourierSeries& f) {
    return {{"a0", f.a0()},
            {"a", std::vector<double>(f.cos_coeffs().begin(), f.cos_coeffs().end())},
            {"b", std::vector<double>(f.sin_coeffs().begin(), f.sin_coeffs().end())}};
}

FourierSeries series_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "series must be a JSON object");
    std::vector<double> a = numbers(j, "a"), b = numbers(j, "b");
    const std::size_t n = std::max(a.size(), b.size());
    a.resize(n, 0.0);
    b.resize(n, 0.0);
    return FourierSeries(j.contains("a0") ? number(j, "a0") : 0.0, std::move(a), std::move(b));
}

json to_json(const PhaseModel& pm) { return {{"omega", pm.omega}, {"Z", to_json(pm.Z)}, {"period", pm.period}}; }

PhaseModel phase_model_from_json(const json& j) {
    if (!j.is_object() || !j.contains("Z")) throw Error(ErrorKind::InvalidArgument, "phase model needs 'omega' and 'Z'");
    PhaseModel pm;
    pm.omega = number(j, "omega");
    if (!(pm.omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "phase model frequency must be positive");
    pm.Z = series_from_json(j.at("Z"));
    pm.period = j.contains("period") ? number(j, "period") : 2.0 * std::acos(-1.0) / pm.omega;
    return pm;
}

json to_json(const Waveform& w) {
    return {{"series", to_json(w.v)},     {"omega_f", w.omega_f},
            {"ratio", w.ratio.str()},     {"energy", w.energy},
            {"family", to_string(w.family)}, {"target", w.target}};
}

Waveform waveform_from_json(const json& j) {
    if (!j.is_object() || !j.contains("series") || !j.contains("ratio") || !j.at("ratio").is_string()) {
        throw Error(ErrorKind::InvalidArgument, "waveform needs 'series', 'ratio' and 'omega_f'");
    }
    const SubharmonicRatio r = SubharmonicRatio::parse(j.at("ratio").get<std::string>());
    const double wf = number(j, "omega_f");
    const Family fam = j.contains("family") && j.at("family").is_string()
                           ? family_from_string(j.at("family").get<std::string>())
                           : Family::Custom;
    return make_waveform(series_from_json(j.at("series")), r, static_cast<double>(r.M()) / r.N() * wf, fam);
}

json to_json(const InteractionFn& fn) {
    return {{"phi_plus", fn.phi_plus},
            {"phi_minus", fn.phi_minus},
            {"lambda_max", fn.lambda_max},
            {"lambda_min", fn.lambda_min},
            {"ratio", fn.ratio.str()}};
}

json to_json(const RateEstimate& r) {
    return {{"kappa", r.kappa},
            {"intercept", r.intercept},
            {"residual", r.residual},
            {"points", r.points},
            {"source", to_string(r.source)}};
}

std::string format_number(double x) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<CsvCell>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (row[i]) out += format_number(*row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string tongue_csv(const TongueBoundary& tb) {
    std::vector<std::vector<CsvCell>> rows;
    for (const auto& p : tb.points) rows.push_back({p.abscissa, p.p_left, p.p_right});
    return csv_text({"abscissa", "p_left", "p_right"}, rows);
}

std::string series_csv(const FourierSeries& f, const std::string& x_name, const std::string& y_name, int samples) {
    const std::vector<double> y = f.sample(samples);
    std::vector<std::vector<CsvCell>> rows;
    rows.reserve(samples);
    for (int k = 0; k < samples; ++k) rows.push_back({2.0 * std::acos(-1.0) * k / samples, y[k]});
    return csv_text({x_name, y_name}, rows);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidArgument, path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    out << text;
}

std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

RunManifest::RunManifest(std::string command, std::string version)
    : command_(std::move(command)), version_(std::move(version)) {}

void RunManifest::add_input(const std::string& name, const std::string& bytes) { inputs_[name] = sha256_hex(bytes); }

void RunManifest::set_parameter(const std::string& key, json value) { parameters_[key] = std::move(value); }

void RunManifest::add_warning(const std::string& text) { warnings_.push_back(text); }

void RunManifest::write(const std::filesystem::path& dir, const std::string& name, const std::string& bytes) {
    write_text_file(dir / name, bytes);
    outputs_[name] = sha256_hex(bytes);
}

json RunManifest::to_json() const {
    json in = json::object(), out = json::object();
    for (const auto& [k, v] : inputs_) in[k] = v;
    for (const auto& [k, v] : outputs_) out[k] = v;
    return {{"command", command_}, {"version", version_}, {"inputs", in},
            {"parameters", parameters_}, {"warnings", warnings_}, {"outputs", out}};
}

void RunManifest::finish(const std::filesystem::path& dir) const {
    write_text_file(dir / "manifest.json", to_json().dump(2) + "\n");
}

}  // namespace entrain
