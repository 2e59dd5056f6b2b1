#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "hclib/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void emit(const hc::CurveReport& rep, const std::string& format,
          const std::string& out_dir, const std::string& stem) {
    struct Piece {
        const char* key;
        const char* ext;
        const std::string* text;
    };
    Piece pieces[] = {{"json", ".json", &rep.json_text},
                      {"dot", ".dot", &rep.dot_text},
                      {"ascii", ".txt", &rep.ascii_text}};
    for (auto& pc : pieces) {
        if (format != "all" && format != pc.key) continue;
        if (out_dir.empty()) {
            std::cout << *pc.text;
            if (!pc.text->empty() && pc.text->back() != '\n') std::cout << "\n";
        } else {
            std::ofstream f(fs::path(out_dir) / (stem + pc.ext));
            f << *pc.text;
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cluster pictures, regular models and integral differentials "
                 "of hyperelliptic curves y^2 = f(x) over Q_p"};

    unsigned long prime = 0;
    std::string poly, picture_path, format = "json", out_dir;
    bool minimal = true;
    unsigned long residue_cap = 12;
    std::vector<std::string> batch_files;
    bool batch = false;

    app.add_option("--prime,-p", prime, "residue characteristic p");
    app.add_option("--poly,-f", poly, "f(x) as an expression in x");
    app.add_option("--picture", picture_path, "combinatorial picture JSON file");
    app.add_flag("--minimal,!--no-minimal", minimal,
                 "blow down to the minimal regular SNC model (default on)");
    app.add_option("--format", format, "json|dot|ascii|all")
        ->check(CLI::IsMember({"json", "dot", "ascii", "all"}));
    app.add_option("--residue-cap", residue_cap, "residue extension degree cap");
    app.add_option("--out", out_dir, "output directory (stdout if omitted)");
    app.add_option("files", batch_files, "batch job files (JSON, one curve each)");
    app.add_flag("--batch", batch, "batch mode even with an empty file list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (!out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
    }

    if (batch || !batch_files.empty()) {
        // batch mode: each file is {"p":.., "poly":"..."|"picture":{..}, "minimal":..}
        std::vector<std::future<hc::CurveReport>> jobs;
        std::vector<std::string> names;
        std::vector<std::string> load_errors(batch_files.size());
        for (size_t i = 0; i < batch_files.size(); ++i) {
            names.push_back(fs::path(batch_files[i]).stem().string());
            hc::CurveInput in;
            try {
                json job = json::parse(slurp(batch_files[i]));
                in.p = job.at("p").get<unsigned long>();
                if (job.contains("poly")) in.poly_expr = job["poly"].get<std::string>();
                if (job.contains("picture")) in.picture_json = job["picture"].dump();
                if (job.contains("minimal")) in.minimal = job["minimal"].get<bool>();
                if (job.contains("residue_cap"))
                    in.residue_cap = job["residue_cap"].get<unsigned long>();
            } catch (const std::exception& e) {
                load_errors[i] = e.what();
                jobs.emplace_back();
                continue;
            }
            jobs.push_back(std::async(std::launch::async,
                                      [in] { return hc::run_curve(in); }));
        }
        json agg;
        agg["curves"] = json::array();
        bool all_ok = true;
        for (size_t i = 0; i < jobs.size(); ++i) {
            json row;
            row["file"] = batch_files[i];
            if (!load_errors[i].empty()) {
                row["error"] = load_errors[i];
                all_ok = false;
            } else {
                hc::CurveReport rep = jobs[i].get();
                row["ok"] = rep.ok();
                row["genus_ok"] = rep.genus_ok;
                if (!rep.errors.empty()) row["errors"] = rep.errors;
                if (!rep.ok() || !rep.genus_ok) all_ok = false;
                if (!out_dir.empty()) emit(rep, format, out_dir, names[i]);
            }
            agg["curves"].push_back(row);
        }
        agg["all_ok"] = all_ok;
        if (out_dir.empty())
            std::cout << agg.dump(2) << "\n";
        else
            std::ofstream(fs::path(out_dir) / "batch.json") << agg.dump(2) << "\n";
        return all_ok ? 0 : 1;
    }

    if (prime == 0 || (poly.empty() && picture_path.empty())) {
        std::cerr << "usage error: need --prime and one of --poly/--picture "
                     "(or batch files)\n";
        return 2;
    }

    hc::CurveInput in;
    in.p = prime;
    in.poly_expr = poly;
    in.minimal = minimal;
    in.residue_cap = residue_cap;
    if (!picture_path.empty()) {
        try {
            in.picture_json = slurp(picture_path);
        } catch (const std::exception& e) {
            std::cerr << "usage error: " << e.what() << "\n";
            return 2;
        }
    }
    hc::CurveReport rep = hc::run_curve(in);
    emit(rep, format, out_dir, "report");
    return rep.ok() ? 0 : 1;
}
