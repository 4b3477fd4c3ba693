// radvlp: command-line front end for de-identification, curation and
// embedding evaluation.
//
// Exit codes: 0 success, 1 computational failure, 2 input or schema error.
// Diagnostics go to stderr; results go to stdout or to files.

#include "radvlp/core/error.hpp"
#include "radvlp/core/json_io.hpp"
#include "radvlp/core/parallel.hpp"
#include "radvlp/curate/curate.hpp"
#include "radvlp/deid/detect.hpp"
#include "radvlp/deid/detector_config.hpp"
#include "radvlp/deid/eval.hpp"
#include "radvlp/deid/surrogate.hpp"
#include "radvlp/embed/clip_loss.hpp"
#include "radvlp/embed/embedding.hpp"
#include "radvlp/embed/lda.hpp"
#include "radvlp/embed/metrics.hpp"
#include "radvlp/embed/probe.hpp"
#include "radvlp/embed/retrieval.hpp"
#include "radvlp/embed/zeroshot.hpp"
#include "radvlp/vit/bundle.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace radvlp;

#ifndef RADVLP_DEFAULT_DATA_DIR
#define RADVLP_DEFAULT_DATA_DIR "data"
#endif

namespace {

// ---------------------------------------------------------------------------
// Shared configuration
// ---------------------------------------------------------------------------

/**
 * JSON pipeline configuration. Relative paths are resolved against the
 * directory of the config file; every entry of "paths" except output_dir
 * must exist when the file is loaded.
 */
struct PipelineConfig {
    io::json root = io::json::object();
    fs::path base = ".";

    static PipelineConfig load(const std::string& path) {
        PipelineConfig c;
        c.root = io::read_json_file(path);
        if (!c.root.is_object()) throw InputError(path + ": config must be a JSON object");
        c.base = fs::path(path).parent_path();
        if (c.root.contains("paths")) {
            if (!c.root["paths"].is_object()) throw InputError(path + ": 'paths' must be an object");
            for (const auto& [key, v] : c.root["paths"].items()) {
                if (!v.is_string()) throw InputError(path + ": paths." + key + " must be a string");
                if (key != "output_dir" && !fs::exists(c.resolve(v.get<std::string>()))) {
                    throw InputError(path + ": paths." + key + " does not exist: " + c.resolve(v.get<std::string>()));
                }
            }
        }
        return c;
    }

    std::string resolve(const std::string& p) const {
        const fs::path fp(p);
        return fp.is_absolute() ? p : (base / fp).lexically_normal().string();
    }

    std::optional<std::string> path(const char* key) const {
        if (root.contains("paths") && root["paths"].contains(key)) return resolve(root["paths"][key].get<std::string>());
        return std::nullopt;
    }

    const io::json* section(const char* name) const {
        if (!root.contains(name)) return nullptr;
        if (!root[name].is_object()) throw InputError(std::string("config section '") + name + "' must be an object");
        return &root[name];
    }

    template <typename T>
    std::optional<T> value(const char* sec, const char* key) const {
        const io::json* s = sec ? section(sec) : &root;
        if (!s || !s->contains(key)) return std::nullopt;
        try {
            return (*s)[key].get<T>();
        } catch (const io::json::exception& e) {
            throw InputError(std::string("config value ") + (sec ? std::string(sec) + "." : "") + key + ": " + e.what());
        }
    }
};

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    bool dry_run = false;

    PipelineConfig cfg;

    void finalize() {
        if (!config.empty()) cfg = PipelineConfig::load(config);
        if (threads == 0) threads = cfg.value<unsigned>(nullptr, "threads").value_or(default_thread_count());
        if (threads == 0) threads = 1;
    }

    std::optional<std::uint64_t> resolved_seed() const {
        if (seed) return seed;
        return cfg.value<std::uint64_t>(nullptr, "master_seed");
    }

    std::uint64_t require_seed(const char* what) const {
        const auto s = resolved_seed();
        if (!s) throw InputError(std::string(what) + " needs a seed (--seed or master_seed in the config)");
        return *s;
    }
};

void add_common(CLI::App* app, CommonOptions& o, bool mutating) {
    app->add_option("--config", o.config, "Pipeline config JSON")->check(CLI::ExistingFile);
    app->add_option("--seed", o.seed, "Master seed (overrides the config)");
    app->add_option("--threads", o.threads, "Worker threads (default: available cores)");
    if (mutating) app->add_flag("--dry-run", o.dry_run, "Report planned writes without writing");
}

std::string first_of(const std::string& flag, const std::optional<std::string>& from_config, const char* what) {
    if (!flag.empty()) return flag;
    if (from_config) return *from_config;
    throw InputError(std::string("missing ") + what);
}

// ---------------------------------------------------------------------------
// Output staging: everything is computed first, then written (or reported).
// ---------------------------------------------------------------------------

class Output {
public:
    explicit Output(bool dry_run) : dry_run_(dry_run) {}

    void add(const std::string& path, std::string content) { files_.emplace_back(path, std::move(content)); }

    void commit() {
        for (const auto& [path, content] : files_) {
            if (dry_run_) {
                std::cout << "dry-run: would write " << path << " (" << content.size() << " bytes)\n";
                continue;
            }
            const fs::path parent = fs::path(path).parent_path();
            if (!parent.empty()) fs::create_directories(parent);
            io::write_file(path, content);
        }
    }

private:
    bool dry_run_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string join_path(const std::string& dir, const char* file) { return (fs::path(dir) / file).string(); }

embed::EmbeddingMatrix load_matrix(const std::string& npy_path) { return embed::load_embeddings(npy_path); }

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

// ---------------------------------------------------------------------------
// deid
// ---------------------------------------------------------------------------

struct DeidOptions {
    CommonOptions common;
    std::string input, out_dir, detector, surrogate;
};

deid::DetectorConfig detector_config(const CommonOptions& c, const std::string& flag) {
    std::string path = flag;
    if (path.empty()) path = c.cfg.path("detector").value_or(std::string(RADVLP_DEFAULT_DATA_DIR) + "/config/detector.json");
    return deid::load_detector_config(path);
}

int run_deid(DeidOptions& o) {
    o.common.finalize();
    const auto& c = o.common;
    const std::string out_dir = first_of(o.out_dir, c.cfg.path("output_dir"), "--out-dir");
    const deid::DetectorConfig dcfg = detector_config(c, o.detector);
    std::string spath = o.surrogate;
    if (spath.empty()) spath = c.cfg.path("surrogate").value_or(std::string(RADVLP_DEFAULT_DATA_DIR) + "/config/surrogate.json");
    deid::SurrogatePolicy policy = deid::load_surrogate_policy(spath);
    if (const auto s = c.resolved_seed()) policy.master_seed = *s;

    const std::vector<RawDocument> docs = io::read_corpus(o.input);
    const std::vector<deid::AnnotatedDocument> annotated = deid::detect_corpus(docs, dcfg, c.threads);
    deid::SurrogateMap map;
    const std::vector<DeidDocument> out = deid::apply_surrogates_corpus(annotated, policy, map, c.threads);

    std::vector<deid::SpanDocument> detected;
    for (const auto& a : annotated) detected.push_back({a.doc.doc_id, a.spans});
    std::sort(detected.begin(), detected.end(), [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });

    std::string audit;
    std::size_t total = 0;
    for (const DeidDocument& d : out) {
        io::ordered_json j;
        j["doc_id"] = d.doc_id;
        j["pseudo_patient_id"] = d.pseudo_patient_id;
        io::ordered_json counts = io::ordered_json::object();
        std::size_t removed = 0;
        for (const PhiCategory cat : kAllPhiCategories) {
            std::size_t n = 0;
            for (const auto& a : d.applied) n += a.original.category == cat ? 1 : 0;
            if (n) counts[std::string(category_name(cat))] = n;
        }
        for (const auto& a : d.applied) removed += a.replacement.empty() ? 1 : 0;
        total += d.applied.size();
        j["replaced"] = std::move(counts);
        j["removed"] = removed;
        audit += j.dump() + "\n";
    }

    Output w(c.dry_run);
    w.add(join_path(out_dir, "surrogate_corpus.jsonl"), io::to_json_lines(out));
    w.add(join_path(out_dir, "surrogate_map.json"), deid::to_json(map).dump(2) + "\n");
    w.add(join_path(out_dir, "audit.jsonl"), audit);
    w.add(join_path(out_dir, "detected_spans.jsonl"), io::to_json_lines(detected));
    w.commit();

    io::ordered_json summary;
    summary["documents"] = out.size();
    summary["patients"] = map.patients.size();
    summary["spans"] = total;
    summary["master_seed"] = policy.master_seed;
    std::cout << summary.dump() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval-deid
// ---------------------------------------------------------------------------

struct EvalDeidOptions {
    CommonOptions common;
    std::string gold, pred, input, detector, policy, csv, json;
};

int run_eval_deid(EvalDeidOptions& o) {
    o.common.finalize();
    const auto& c = o.common;
    const std::string policy_name = !o.policy.empty() ? o.policy : c.cfg.value<std::string>("eval", "policy").value_or("exact");
    const deid::MatchPolicy policy = deid::parse_match_policy(policy_name);
    const auto gold = deid::read_span_documents(o.gold);
    std::vector<deid::SpanDocument> pred;
    if (!o.pred.empty()) {
        pred = deid::read_span_documents(o.pred);
    } else if (!o.input.empty()) {
        const auto docs = io::read_corpus(o.input);
        const auto dcfg = detector_config(c, o.detector);
        for (const auto& a : deid::detect_corpus(docs, dcfg, c.threads)) pred.push_back({a.doc.doc_id, a.spans});
    } else {
        throw InputError("eval-deid needs --pred or --input");
    }
    const deid::EvalReport r = deid::evaluate(pred, gold, policy, c.threads);
    std::cout << deid::render_table(r);
    Output w(c.dry_run);
    if (!o.csv.empty()) w.add(o.csv, deid::render_csv(r));
    if (!o.json.empty()) w.add(o.json, deid::to_json(r).dump(2) + "\n");
    w.commit();
    return 0;
}

// ---------------------------------------------------------------------------
// curate
// ---------------------------------------------------------------------------

struct CurateOptions {
    CommonOptions common;
    std::string studies, ocr, reports, allowlist, out_dir;
    std::optional<std::size_t> ocr_threshold;
};

int run_curate(CurateOptions& o) {
    o.common.finalize();
    const auto& c = o.common;
    const std::string out_dir = first_of(o.out_dir, c.cfg.path("output_dir"), "--out-dir");
    curate::CurateConfig cfg;
    cfg.ocr_threshold = o.ocr_threshold.value_or(c.cfg.value<std::size_t>("curate", "ocr_threshold").value_or(curate::kDefaultOcrThreshold));
    cfg.allowlist = curate::load_allowlist(first_of(o.allowlist, c.cfg.path("allowlist"), "--allowlist"));
    cfg.seed = c.require_seed("curate");

    const auto studies = io::read_studies(first_of(o.studies, c.cfg.path("studies"), "--studies"));
    const auto ocr = curate::read_ocr_records(first_of(o.ocr, c.cfg.path("ocr"), "--ocr"));
    std::vector<curate::ReportRef> reports;
    for (const RawDocument& d : io::read_corpus(first_of(o.reports, c.cfg.path("reports"), "--reports"))) {
        reports.push_back(curate::report_ref(d));
    }
    const curate::CurateResult r = curate::curate_studies(studies, ocr, reports, cfg);

    std::string pairs, discards, kept, dropped;
    for (const auto& p : r.pairs) pairs += curate::pair_to_json(p).dump() + "\n";
    for (const auto& d : r.discarded) discards += curate::to_json(d).dump() + "\n";
    for (const auto& s : r.studies_without_images) {
        io::ordered_json j;
        j["kind"] = "study";
        j["id"] = s;
        j["reason"] = "no image left after OCR filter";
        discards += j.dump() + "\n";
    }
    for (const auto& id : r.kept_images) kept += id + "\n";
    for (const auto& id : r.dropped_images) dropped += id + "\n";

    Output w(c.dry_run);
    w.add(join_path(out_dir, "studies.jsonl"), io::to_json_lines(r.studies));
    w.add(join_path(out_dir, "pairs.jsonl"), pairs);
    w.add(join_path(out_dir, "kept_images.txt"), kept);
    w.add(join_path(out_dir, "dropped_images.txt"), dropped);
    w.add(join_path(out_dir, "discards.jsonl"), discards);
    w.add(join_path(out_dir, "id_map.json"), deid::to_json(r.mapping).dump(2) + "\n");
    w.commit();

    io::ordered_json summary;
    summary["pairs"] = r.pairs.size();
    summary["images_kept"] = r.kept_images.size();
    summary["images_dropped"] = r.dropped_images.size();
    summary["items_discarded"] = r.discarded.size() + r.studies_without_images.size();
    summary["ocr_threshold"] = cfg.ocr_threshold;
    std::cout << summary.dump() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// zeroshot
// ---------------------------------------------------------------------------

struct DatasetSpec {
    std::string name, images, labels, prompts, grouping;
};

struct ZeroShotOptions {
    CommonOptions common;
    DatasetSpec single;
    std::string prompt_embeddings, csv, json;
    std::vector<std::string> strategies;
};

std::vector<DatasetSpec> zeroshot_datasets(const ZeroShotOptions& o) {
    if (!o.single.images.empty()) {
        DatasetSpec d = o.single;
        if (d.labels.empty() || d.prompts.empty()) throw InputError("--images needs --labels and --prompts");
        if (d.name.empty()) d.name = fs::path(d.images).stem().string();
        return {d};
    }
    const io::json* sec = o.common.cfg.section("zeroshot");
    if (!sec || !sec->contains("datasets") || !(*sec)["datasets"].is_array()) {
        throw InputError("zeroshot needs --images/--labels/--prompts or a config 'zeroshot.datasets' list");
    }
    std::vector<DatasetSpec> out;
    for (const auto& e : (*sec)["datasets"]) {
        auto get = [&](const char* k, bool required) -> std::string {
            if (!e.contains(k)) {
                if (required) throw InputError(std::string("zeroshot dataset entry lacks '") + k + "'");
                return {};
            }
            return std::string(k) == "name" ? e[k].get<std::string>() : o.common.cfg.resolve(e[k].get<std::string>());
        };
        out.push_back({get("name", true), get("images", true), get("labels", true), get("prompts", true), get("grouping", false)});
    }
    return out;
}

int run_zeroshot(ZeroShotOptions& o) {
    o.common.finalize();
    const auto& c = o.common;
    std::string pe_path = o.prompt_embeddings;
    if (pe_path.empty()) {
        if (const io::json* sec = c.cfg.section("zeroshot"); sec && sec->contains("prompt_embeddings")) {
            pe_path = c.cfg.resolve((*sec)["prompt_embeddings"].get<std::string>());
        }
    }
    if (pe_path.empty()) throw InputError("missing --prompt-embeddings");
    const embed::EmbeddingMatrix prompt_rows = load_matrix(pe_path);
    std::vector<embed::Strategy> wanted;
    for (const auto& s : o.strategies) wanted.push_back(embed::parse_strategy(s));
    if (wanted.empty()) wanted.assign(embed::kAllStrategies.begin(), embed::kAllStrategies.end());

    const std::vector<DatasetSpec> datasets = zeroshot_datasets(o);
    // auc[strategy][dataset]
    std::vector<std::vector<std::optional<double>>> auc(wanted.size(), std::vector<std::optional<double>>(datasets.size()));
    io::ordered_json report = io::ordered_json::array();
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        const DatasetSpec& ds = datasets[di];
        const embed::EmbeddingMatrix images = load_matrix(ds.images);
        const auto labels = embed::read_labels_csv(ds.labels);
        const embed::PromptFile pf = embed::load_prompt_file(ds.prompts);
        const auto grouping = ds.grouping.empty() ? std::map<std::string, std::string>{} : embed::read_study_grouping(ds.grouping);
        for (std::size_t si = 0; si < wanted.size(); ++si) {
            const auto it = pf.strategies.find(wanted[si]);
            if (it == pf.strategies.end()) continue;
            const embed::PromptSet set = embed::resolve_prompts(it->second, wanted[si], prompt_rows);
            const std::vector<double> scores = embed::zero_shot_scores(images, set);
            std::vector<double> s;
            std::vector<int> y;
            std::size_t units = 0;
            if (!ds.grouping.empty()) {
                std::vector<std::string> study_ids;
                for (const auto& st : embed::pool_study_scores(images.ids, scores, grouping)) {
                    study_ids.push_back(st.study_id);
                    s.push_back(st.score);
                }
                y = embed::align(study_ids, labels, "label");
                units = study_ids.size();
            } else {
                s = scores;
                y = embed::align(images.ids, labels, "label");
                units = images.rows();
            }
            const double a = embed::auroc(s, y);
            auc[si][di] = a;
            io::ordered_json e;
            e["dataset"] = ds.name;
            e["strategy"] = std::string(embed::strategy_name(wanted[si]));
            e["auroc"] = a;
            e["n"] = units;
            e["pooled"] = !ds.grouping.empty();
            report.push_back(std::move(e));
        }
    }

    auto pad = [](std::string t, std::size_t w) { return t.size() < w ? t + std::string(w - t.size(), ' ') : t; };
    std::vector<std::size_t> width;
    for (const auto& d : datasets) width.push_back(std::max<std::size_t>(d.name.size(), 6));
    std::string table = pad("strategy", 12);
    std::string csv = "strategy";
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        table += " | " + pad(datasets[di].name, width[di]);
        csv += "," + datasets[di].name;
    }
    table += "\n";
    csv += "\n";
    for (std::size_t si = 0; si < wanted.size(); ++si) {
        const std::string name(embed::strategy_name(wanted[si]));
        table += pad(name, 12);
        csv += name;
        for (std::size_t di = 0; di < datasets.size(); ++di) {
            table += " | " + pad(auc[si][di] ? fixed(*auc[si][di], 4) : "-", width[di]);
            csv += "," + (auc[si][di] ? fixed(*auc[si][di], 6) : std::string());
        }
        table += "\n";
        csv += "\n";
    }
    std::cout << table;
    Output w(c.dry_run);
    if (!o.csv.empty()) w.add(o.csv, csv);
    if (!o.json.empty()) w.add(o.json, report.dump(2) + "\n");
    w.commit();
    return 0;
}

// ---------------------------------------------------------------------------
// retrieve
// ---------------------------------------------------------------------------

struct RetrieveOptions {
    CommonOptions common;
    std::string images, labels, prompts, prompt_embeddings, strategy, csv, json, folds_out;
    std::vector<std::size_t> ks;
    std::optional<std::size_t> folds;
};

int run_retrieve(RetrieveOptions& o) {
    o.common.finalize();
    const auto& c = o.common;
    const embed::EmbeddingMatrix images = load_matrix(o.images);
    const std::vector<int> labels = embed::align(images.ids, embed::read_labels_csv(o.labels), "label");
    const embed::PromptFile pf = embed::load_prompt_file(o.prompts);
    const embed::Strategy strategy = embed::parse_strategy(
        !o.strategy.empty() ? o.strategy : c.cfg.value<std::string>("eval", "strategy").value_or("text-binary"));
    if (strategy == embed::Strategy::LatentMinimum) {
        throw InputError("retrieval needs one query embedding per class; latent-min has none");
    }
    const auto it = pf.strategies.find(strategy);
    if (it == pf.strategies.end()) throw InputError("prompt file has no '" + std::string(embed::strategy_name(strategy)) + "' entry");
    const embed::PromptSet set = embed::resolve_prompts(it->second, strategy, load_matrix(o.prompt_embeddings));
    auto anchor = [](const std::vector<embed::PromptEntry>& e) {
        embed::Vector m = embed::Vector::Zero(e.front().embedding.size());
        for (const auto& p : e) m += p.embedding;
        return embed::Vector(m / static_cast<double>(e.size()));
    };
    const std::vector<embed::RetrievalQuery> queries{{"normal", 0, anchor(set.normal)}, {"abnormal", 1, anchor(set.abnormal)}};

    std::vector<std::size_t> ks = o.ks;
    if (ks.empty()) ks = c.cfg.value<std::vector<std::size_t>>("eval", "k").value_or(std::vector<std::size_t>{10, 50});
    const std::size_t nfolds = o.folds.value_or(c.cfg.value<std::size_t>("eval", "folds").value_or(5));
    const auto folds = embed::kfold_split(images.ids, nfolds, c.resolved_seed().value_or(0));
    const embed::RetrievalReport r = embed::retrieval_report(images, labels, queries, ks, folds);

    std::cout << embed::render_retrieval_table(r);
    Output w(c.dry_run);
    if (!o.csv.empty()) w.add(o.csv, embed::render_retrieval_csv(r));
    if (!o.json.empty()) {
        io::ordered_json j = embed::to_json(r);
        j["strategy"] = std::string(embed::strategy_name(strategy));
        w.add(o.json, j.dump(2) + "\n");
    }
    if (!o.folds_out.empty()) w.add(o.folds_out, embed::folds_to_json(folds).dump(2) + "\n");
    w.commit();
    return 0;
}

// ---------------------------------------------------------------------------
// probe
// ---------------------------------------------------------------------------

struct ProbeOptions {
    CommonOptions common;
    std::string kind = "classifier", train, train_labels, valid, valid_labels, test, test_labels, out;
    std::optional<double> lr;
    std::optional<std::size_t> max_epochs;
};

std::vector<double> probe_targets(const embed::EmbeddingMatrix& m, const std::string& path, embed::ProbeKind kind) {
    if (kind == embed::ProbeKind::LogisticClassifier) {
        const auto l = embed::align(m.ids, embed::read_labels_csv(path), "label");
        return {l.begin(), l.end()};
    }
    return embed::align(m.ids, embed::read_targets_csv(path), "target");
}

io::ordered_json probe_metrics(const embed::ProbeModel& model, const embed::EmbeddingMatrix& m, const std::vector<double>& y) {
    io::ordered_json j;
    const std::vector<double> pred = model.predict(m.data);
    j["n"] = y.size();
    if (model.kind == embed::ProbeKind::LogisticClassifier) {
        const std::vector<int> yi(y.begin(), y.end());
        j["auroc"] = embed::auroc(pred, yi);
    } else {
        j["mad"] = embed::mad(pred, y);
    }
    return j;
}

int run_probe(ProbeOptions& o) {
    o.common.finalize();
    const auto& c = o.common;
    const embed::ProbeKind kind = embed::parse_probe_kind(o.kind);
    embed::ProbeConfig cfg;
    cfg.learning_rate = o.lr.value_or(c.cfg.value<double>("probe", "learning_rate").value_or(cfg.learning_rate));
    cfg.max_epochs = o.max_epochs.value_or(c.cfg.value<std::size_t>("probe", "max_epochs").value_or(cfg.max_epochs));
    const auto tr = load_matrix(o.train), va = load_matrix(o.valid);
    const auto ytr = probe_targets(tr, o.train_labels, kind), yva = probe_targets(va, o.valid_labels, kind);
    const embed::ProbeResult r = embed::train_probe(tr.data, ytr, va.data, yva, kind, cfg);

    io::ordered_json j;
    j["kind"] = std::string(embed::probe_kind_name(kind));
    j["learning_rate"] = cfg.learning_rate;
    j["epochs_run"] = r.epochs_run;
    j["best_epoch"] = r.best_epoch;
    j["best_validation_loss"] = r.best_validation_loss;
    j["validation"] = probe_metrics(r.model, va, yva);
    if (!o.test.empty()) {
        const auto te = load_matrix(o.test);
        j["test"] = probe_metrics(r.model, te, probe_targets(te, o.test_labels.empty() ? o.valid_labels : o.test_labels, kind));
    }
    std::cout << j.dump(2) << "\n";
    if (!o.out.empty()) {
        io::ordered_json m;
        m["kind"] = j["kind"];
        m["weights"] = std::vector<double>(r.model.weights.data(), r.model.weights.data() + r.model.weights.size());
        m["bias"] = r.model.bias;
        if (kind == embed::ProbeKind::LinearRegressor) {
            m["scale"] = r.model.scale;
            m["shift"] = r.model.shift;
        } else {
            m["pos_weight"] = r.pos_weight;
        }
        Output w(c.dry_run);
        w.add(o.out, m.dump(2) + "\n");
        w.commit();
    }
    return 0;
}

// ---------------------------------------------------------------------------
// cliploss / lda
// ---------------------------------------------------------------------------

struct ClipOptions {
    CommonOptions common;
    std::string images, texts;
    std::optional<double> temperature;
};

int run_cliploss(ClipOptions& o) {
    o.common.finalize();
    embed::ClipLossConfig cfg;
    cfg.temperature = o.temperature.value_or(o.common.cfg.value<double>("eval", "temperature").value_or(cfg.temperature));
    const auto img = load_matrix(o.images), txt = load_matrix(o.texts);
    io::ordered_json j;
    j["loss"] = embed::clip_loss(img, txt, cfg);
    j["temperature"] = cfg.temperature;
    j["n"] = img.rows();
    std::cout << j.dump() << "\n";
    return 0;
}

struct LdaOptions {
    CommonOptions common;
    std::string embeddings, labels, out;
    std::size_t bins = 20;
};

int run_lda(LdaOptions& o) {
    o.common.finalize();
    const auto m = load_matrix(o.embeddings);
    const std::vector<int> y = embed::align(m.ids, embed::read_labels_csv(o.labels), "label");
    const embed::LdaResult r = embed::lda_direction(m.data, y);
    if (o.bins == 0) throw InputError("--bins must be positive");
    const auto [lo_it, hi_it] = std::minmax_element(r.projections.begin(), r.projections.end());
    const double lo = *lo_it, hi = *hi_it, width = hi > lo ? (hi - lo) / static_cast<double>(o.bins) : 1.0;
    std::vector<std::size_t> h0(o.bins, 0), h1(o.bins, 0);
    for (std::size_t i = 0; i < r.projections.size(); ++i) {
        const auto b = std::min(o.bins - 1, static_cast<std::size_t>((r.projections[i] - lo) / width));
        (y[i] ? h1 : h0)[b] += 1;
    }
    io::ordered_json j;
    j["separation"] = r.separation;
    j["ridge"] = r.ridge;
    j["range"] = {lo, hi};
    j["histogram"] = {{"class0", h0}, {"class1", h1}};
    std::cout << j.dump() << "\n";
    if (!o.out.empty()) {
        std::string csv = "id,label,projection\n";
        char buf[40];
        for (std::size_t i = 0; i < m.ids.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.9g", r.projections[i]);
            csv += m.ids[i] + "," + std::to_string(y[i]) + "," + buf + "\n";
        }
        Output w(o.common.dry_run);
        w.add(o.out, csv);
        w.commit();
    }
    return 0;
}

// ---------------------------------------------------------------------------
// resize-weights
// ---------------------------------------------------------------------------

struct ResizeOptions {
    CommonOptions common;
    std::string in, out;
    vit::ResizeRequest req;
    std::optional<std::size_t> grid, patch;
    std::string layout;
};

int run_resize(ResizeOptions& o) {
    o.common.finalize();
    if (!o.grid && !o.patch) throw InputError("resize-weights needs --grid and/or --patch-size");
    o.req.grid = o.grid;
    o.req.patch_size = o.patch;
    o.req.threads = o.common.threads;
    if (!o.layout.empty()) o.req.default_layout = o.layout;
    vit::WeightBundle b = vit::load_bundle(o.in);
    const vit::ResizeSummary s = vit::resize_bundle(b, o.req);
    for (const auto& a : s.actions) std::cout << a << "\n";
    Output w(o.common.dry_run);
    for (auto& [file, bytes] : vit::bundle_files(b)) w.add((fs::path(o.out) / file).string(), std::move(bytes));
    w.commit();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radvlp: report de-identification, curation and embedding evaluation"};
    app.require_subcommand(1);

    DeidOptions deid_o;
    auto* deid_cmd = app.add_subcommand("deid", "Detect PHI and write a surrogate corpus");
    add_common(deid_cmd, deid_o.common, true);
    deid_cmd->add_option("--input", deid_o.input, "Line-JSON corpus")->required();
    deid_cmd->add_option("--out-dir", deid_o.out_dir, "Output directory");
    deid_cmd->add_option("--detector", deid_o.detector, "Detector config JSON");
    deid_cmd->add_option("--surrogate", deid_o.surrogate, "Surrogate policy JSON");

    EvalDeidOptions ev_o;
    auto* ev_cmd = app.add_subcommand("eval-deid", "Score detected spans against gold spans");
    add_common(ev_cmd, ev_o.common, true);
    ev_cmd->add_option("--gold", ev_o.gold, "Gold standoff spans (line-JSON)")->required();
    ev_cmd->add_option("--pred", ev_o.pred, "Predicted standoff spans (line-JSON)");
    ev_cmd->add_option("--input", ev_o.input, "Corpus to run the detector on instead of --pred");
    ev_cmd->add_option("--detector", ev_o.detector, "Detector config JSON");
    ev_cmd->add_option("--policy", ev_o.policy, "exact|overlap");
    ev_cmd->add_option("--csv", ev_o.csv, "Write the metrics CSV here");
    ev_cmd->add_option("--json", ev_o.json, "Write the metrics JSON here");

    CurateOptions cu_o;
    auto* cu_cmd = app.add_subcommand("curate", "OCR filter, pairing and metadata scrubbing");
    add_common(cu_cmd, cu_o.common, true);
    cu_cmd->add_option("--studies", cu_o.studies, "Study records (line-JSON)");
    cu_cmd->add_option("--ocr", cu_o.ocr, "OCR records (line-JSON)");
    cu_cmd->add_option("--reports", cu_o.reports, "Report corpus (line-JSON)");
    cu_cmd->add_option("--allowlist", cu_o.allowlist, "Metadata key allowlist");
    cu_cmd->add_option("--out-dir", cu_o.out_dir, "Output directory");
    cu_cmd->add_option("--ocr-threshold", cu_o.ocr_threshold, "Keep images with fewer non-whitespace characters");

    ZeroShotOptions zs_o;
    auto* zs_cmd = app.add_subcommand("zeroshot", "Zero-shot AUROC per prompting strategy");
    add_common(zs_cmd, zs_o.common, true);
    zs_cmd->add_option("--images", zs_o.single.images, "Image embeddings (.npy with .json manifest)");
    zs_cmd->add_option("--labels", zs_o.single.labels, "id,label CSV");
    zs_cmd->add_option("--prompts", zs_o.single.prompts, "Prompt file JSON");
    zs_cmd->add_option("--grouping", zs_o.single.grouping, "image_id,study_id CSV; labels are then per study");
    zs_cmd->add_option("--name", zs_o.single.name, "Dataset name in the table");
    zs_cmd->add_option("--prompt-embeddings", zs_o.prompt_embeddings, "Prompt embeddings (.npy, ids = prompt texts)");
    zs_cmd->add_option("--strategy", zs_o.strategies, "text-binary|text-enum|latent-min|latent-mean (repeatable)");
    zs_cmd->add_option("--csv", zs_o.csv, "Write the AUROC table as CSV");
    zs_cmd->add_option("--json", zs_o.json, "Write per-run results as JSON");

    RetrieveOptions rt_o;
    auto* rt_cmd = app.add_subcommand("retrieve", "Text-to-image precision@k over folds");
    add_common(rt_cmd, rt_o.common, true);
    rt_cmd->add_option("--images", rt_o.images, "Image embeddings")->required();
    rt_cmd->add_option("--labels", rt_o.labels, "id,label CSV")->required();
    rt_cmd->add_option("--prompts", rt_o.prompts, "Prompt file JSON")->required();
    rt_cmd->add_option("--prompt-embeddings", rt_o.prompt_embeddings, "Prompt embeddings")->required();
    rt_cmd->add_option("--strategy", rt_o.strategy, "Which prompts form the class queries (default text-binary)");
    rt_cmd->add_option("--k", rt_o.ks, "Cut-offs (repeatable, default 10 and 50)");
    rt_cmd->add_option("--folds", rt_o.folds, "Number of folds (default 5)");
    rt_cmd->add_option("--csv", rt_o.csv, "Write per-fold values as CSV");
    rt_cmd->add_option("--json", rt_o.json, "Write the report as JSON");
    rt_cmd->add_option("--folds-out", rt_o.folds_out, "Write fold assignments as JSON");

    ProbeOptions pr_o;
    auto* pr_cmd = app.add_subcommand("probe", "Train and evaluate a linear probe");
    add_common(pr_cmd, pr_o.common, true);
    pr_cmd->add_option("--kind", pr_o.kind, "classifier|regressor");
    pr_cmd->add_option("--train", pr_o.train, "Training embeddings")->required();
    pr_cmd->add_option("--train-labels", pr_o.train_labels, "Training labels/targets CSV")->required();
    pr_cmd->add_option("--valid", pr_o.valid, "Validation embeddings")->required();
    pr_cmd->add_option("--valid-labels", pr_o.valid_labels, "Validation labels/targets CSV")->required();
    pr_cmd->add_option("--test", pr_o.test, "Test embeddings");
    pr_cmd->add_option("--test-labels", pr_o.test_labels, "Test labels/targets CSV");
    pr_cmd->add_option("--lr", pr_o.lr, "Initial learning rate (default 1e-4)");
    pr_cmd->add_option("--max-epochs", pr_o.max_epochs, "Epoch budget (one full-batch step per epoch)");
    pr_cmd->add_option("--out", pr_o.out, "Write the best model as JSON");

    ClipOptions cl_o;
    auto* cl_cmd = app.add_subcommand("cliploss", "Contrastive loss of matched image/text rows");
    add_common(cl_cmd, cl_o.common, false);
    cl_cmd->add_option("--images", cl_o.images, "Image embeddings")->required();
    cl_cmd->add_option("--texts", cl_o.texts, "Text embeddings, row-matched")->required();
    cl_cmd->add_option("--temperature", cl_o.temperature, "Softmax temperature (default 0.07)");

    LdaOptions ld_o;
    auto* ld_cmd = app.add_subcommand("lda", "Two-class discriminant projection");
    add_common(ld_cmd, ld_o.common, true);
    ld_cmd->add_option("--embeddings", ld_o.embeddings, "Embeddings")->required();
    ld_cmd->add_option("--labels", ld_o.labels, "id,label CSV")->required();
    ld_cmd->add_option("--out", ld_o.out, "Write id,label,projection CSV");
    ld_cmd->add_option("--bins", ld_o.bins, "Histogram bins");

    ResizeOptions rs_o;
    auto* rs_cmd = app.add_subcommand("resize-weights", "Resize position embeddings and patch kernels");
    add_common(rs_cmd, rs_o.common, true);
    rs_cmd->add_option("--in", rs_o.in, "Input weight bundle directory")->required();
    rs_cmd->add_option("--out", rs_o.out, "Output weight bundle directory")->required();
    rs_cmd->add_option("--grid", rs_o.grid, "New position grid side");
    rs_cmd->add_option("--patch-size", rs_o.patch, "New patch size");
    rs_cmd->add_option("--pos-embed-name", rs_o.req.pos_embed_name, "Position embedding tensor name");
    rs_cmd->add_option("--kernel-name", rs_o.req.kernel_name, "Patch kernel tensor name");
    rs_cmd->add_option("--prefix-tokens", rs_o.req.prefix_tokens, "Tokens before the grid (default 1)");
    rs_cmd->add_option("--layout", rs_o.layout, "Kernel layout when the index has none: OIHW|OHWI|HWIO");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*deid_cmd) return run_deid(deid_o);
        if (*ev_cmd) return run_eval_deid(ev_o);
        if (*cu_cmd) return run_curate(cu_o);
        if (*zs_cmd) return run_zeroshot(zs_o);
        if (*rt_cmd) return run_retrieve(rt_o);
        if (*pr_cmd) return run_probe(pr_o);
        if (*cl_cmd) return run_cliploss(cl_o);
        if (*ld_cmd) return run_lda(ld_o);
        if (*rs_cmd) return run_resize(rs_o);
    } catch (const InputError& e) {
        std::cerr << "radvlp: input error: " << e.what() << "\n";
        return 2;
    } catch (const io::json::exception& e) {
        std::cerr << "radvlp: input error: " << e.what() << "\n";
        return 2;
    } catch (const ComputeError& e) {
        std::cerr << "radvlp: error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "radvlp: error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
