#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "entrain/arnold.hpp"
#include "entrain/ode.hpp"
#include "entrain/phase_reduce.hpp"
#include "entrain/sim.hpp"
#include "entrain/synthesis.hpp"

namespace entrain {

using nlohmann::json;

// Model configuration: {"model":"hodgkin-huxley","params":{...},"dt":...,
// "settle_periods":...,"resolution":...}. "planar-normal-form" is also known.
struct ModelConfig {
    std::string model = "hodgkin-huxley";
    std::map<std::string, double> params;
    double dt = 0.001;
    double settle_periods = 20.0;
    int resolution = 4096;

    [[nodiscard]] VectorField field() const;
    [[nodiscard]] State initial_state() const;
    [[nodiscard]] LimitCycleOptions cycle_options() const;
    [[nodiscard]] std::vector<std::string> column_names() const;
};

ModelConfig model_config_from_json(const json& j);
json to_json(const ModelConfig& c);

json to_json(const FourierSeries& f);
FourierSeries series_from_json(const json& j);

json to_json(const PhaseModel& pm);
PhaseModel phase_model_from_json(const json& j);

json to_json(const Waveform& w);
Waveform waveform_from_json(const json& j);

json to_json(const InteractionFn& fn);
json to_json(const RateEstimate& r);

// 17 significant digits, '.' decimal point, independent of locale.
std::string format_number(double x);

using CsvCell = std::optional<double>;

// Rows of numbers; absent cells are written empty.
std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<CsvCell>>& rows);

std::string tongue_csv(const TongueBoundary& tb);
std::string series_csv(const FourierSeries& f, const std::string& x_name, const std::string& y_name,
                       int samples = 1024);

json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string sha256_hex(const std::string& bytes);

// Collects the files written by one command and their digests.
class RunManifest {
public:
    RunManifest(std::string command, std::string version);

    void add_input(const std::string& name, const std::string& bytes);
    void set_parameter(const std::string& key, json value);
    void add_warning(const std::string& text);
    // Writes the file and records its digest.
    void write(const std::filesystem::path& dir, const std::string& name, const std::string& bytes);
    // Writes manifest.json into dir.
    void finish(const std::filesystem::path& dir) const;
    [[nodiscard]] json to_json() const;

private:
    std::string command_;
    std::string version_;
    std::map<std::string, std::string> inputs_;
    json parameters_ = json::object();
    std::vector<std::string> warnings_;
    std::map<std::string, std::string> outputs_;
};

}  // namespace entrain
