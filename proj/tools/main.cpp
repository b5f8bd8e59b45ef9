// Command-line surface: train / predict / evaluate / gridsearch / quantify.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 convergence error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sentikit/model_io.hpp"
#include "sentikit/pipeline.hpp"
#include "sentikit/select.hpp"

namespace {

using namespace sentikit;

struct CommonArgs {
    std::string config_path;
    std::string subtask;
    std::optional<long long> seed;
    int jobs = 1;
};

cfg::RunConfig make_config(const CommonArgs& args) {
    std::optional<cfg::Subtask> subtask;
    if (!args.subtask.empty()) subtask = cfg::parse_subtask(args.subtask);
    cfg::RunConfig rc;
    if (!args.config_path.empty()) {
        rc = cfg::run_config_from_file(args.config_path, subtask);
    } else if (subtask) {
        rc = cfg::default_config(*subtask);
    } else {
        throw UsageError("either --config or --subtask is required");
    }
    if (args.seed) rc.seed = static_cast<uint64_t>(*args.seed);
    if (args.jobs > 1) rc.jobs = args.jobs;
    return rc;
}

int cmd_train(const CommonArgs& args, const std::string& train_path, const std::string& model_out) {
    auto t0 = std::chrono::steady_clock::now();
    cfg::RunConfig rc = make_config(args);
    auto dataset = corpus::load_dataset(train_path, rc.schema());
    auto resources = pipeline::load_resources(rc);
    pipeline::TrainSummary summary;
    auto container = pipeline::train_container(rc, dataset, resources, &summary);
    io::save_container(container, model_out);
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("trained subtask %s model (%s) on %zu documents", container.subtask.c_str(),
                container.kind == io::ModelKind::stacked ? "stacked" : "single", summary.n_documents);
    if (dataset.skipped_unavailable > 0)
        std::printf(" (%zu unavailable rows skipped)", dataset.skipped_unavailable);
    std::printf("\nfeature keys: %zu, vector dim: %zu, objective: %.6g, wall time: %.1fs\n",
                summary.n_categorical_keys, summary.vector_dim, summary.objective, secs);
    std::printf("model written to %s\n", model_out.c_str());
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, const std::string& pos_path, int jobs) {
    auto container = io::load_container(model_path);
    pipeline::verify_fingerprint(container);
    auto dataset = corpus::load_dataset(data_path, container.schema);
    std::map<std::string, std::vector<std::string>> pos_tags;
    const std::map<std::string, std::vector<std::string>>* tags = nullptr;
    if (!pos_path.empty()) {
        pos_tags = pipeline::load_pos_tags(pos_path);
        tags = &pos_tags;
    }
    auto labels = pipeline::predict_container(container, dataset, tags, jobs);
    corpus::write_predictions(dataset, labels, out_path);
    std::printf("wrote %zu predictions to %s\n", labels.size(), out_path.c_str());
    return 0;
}

int cmd_evaluate(const std::string& gold_path, const std::string& pred_path, const std::string& subtask_s) {
    cfg::Subtask subtask = cfg::parse_subtask(subtask_s);
    corpus::Schema schema = cfg::schema_for(subtask);
    auto gold = corpus::load_dataset(gold_path, schema);
    const auto& classes = corpus::classes_for(schema);
    char buf[64];
    auto print = [&](const std::string& name, double v) {
        std::snprintf(buf, sizeof buf, "%.4f", v);
        std::printf("%s\t%s\n", name.c_str(), buf);
    };

    if (subtask == cfg::Subtask::D) {
        // prediction file holds per-topic prevalence estimates
        std::ifstream in(pred_path);
        if (!in) throw DataError("cannot open prediction file: " + pred_path);
        std::map<std::string, eval::Prevalence> estimates;
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (str::trim(line).empty()) continue;
            auto fields = str::split(line, '\t');
            if (fields.size() != 3)
                throw DataError("quantification line " + std::to_string(line_no) +
                                ": expected topic<TAB>p_pos<TAB>p_neg");
            eval::Prevalence p;
            p.p["positive"] = std::stod(fields[1]);
            p.p["negative"] = std::stod(fields[2]);
            estimates[fields[0]] = p;
        }
        std::map<std::string, std::vector<std::string>> gold_by_topic;
        for (const auto& r : gold.records)
            gold_by_topic[r.topic ? *r.topic : ""].push_back(*r.label);
        double sum = 0.0;
        for (const auto& [topic, labels] : gold_by_topic) {
            auto it = estimates.find(topic);
            if (it == estimates.end()) throw DataError("no prevalence estimate for topic '" + topic + "'");
            sum += eval::kld_smoothed(eval::prevalence_from_labels(labels, classes), it->second,
                                      labels.size());
        }
        print("kld", sum / static_cast<double>(gold_by_topic.size()));
        return 0;
    }

    auto preds = corpus::load_predictions(pred_path, schema);
    std::map<std::string, std::string> by_id;
    for (const auto& p : preds) {
        if (!by_id.emplace(p.id, p.label).second)
            throw DataError("duplicate prediction for id '" + p.id + "'");
    }
    std::vector<std::string> g, p, topics;
    for (const auto& r : gold.records) {
        auto it = by_id.find(r.id);
        if (it == by_id.end()) throw DataError("no prediction for id '" + r.id + "'");
        g.push_back(*r.label);
        p.push_back(it->second);
        topics.push_back(r.topic ? *r.topic : "");
    }
    if (by_id.size() != g.size())
        throw DataError("prediction file has entries for ids not present in the gold data");

    cfg::Measure measure = cfg::default_measure(subtask);
    print(cfg::measure_name(measure), pipeline::compute_measure(measure, g, p, classes, &topics));
    print("accuracy", pipeline::compute_measure(cfg::Measure::accuracy, g, p, classes));
    return 0;
}

int cmd_gridsearch(const CommonArgs& args, const std::string& train_path, const std::string& report_out,
                   const std::string& dev_path, const std::string& devtest_path) {
    cfg::RunConfig rc = make_config(args);
    if (rc.model.kind == cfg::ModelKind::stacked) {
        // grid search tunes one linear model at a time; for stacked configs
        // this is the joint-hinge SVM the ensemble is built from
        rc.model.kind = cfg::ModelKind::single;
        rc.model.loss = linear::Loss::crammer_singer;
    }
    auto train = corpus::load_dataset(train_path, rc.schema());
    auto resources = pipeline::load_resources(rc);

    std::optional<corpus::Dataset> dev, devtest;
    if (!dev_path.empty()) dev = corpus::load_dataset(dev_path, rc.schema());
    if (!devtest_path.empty()) devtest = corpus::load_dataset(devtest_path, rc.schema());

    auto report = select::validate_grid(train, dev ? &*dev : nullptr, devtest ? &*devtest : nullptr,
                                        rc.grid, rc, resources, rc.cv_folds, rc.seed);

    std::ofstream tsv(report_out, std::ios::binary);
    if (!tsv) throw DataError("cannot open report file: " + report_out);
    select::write_report_tsv(report, tsv);
    std::ofstream js(report_out + ".json", std::ios::binary);
    select::write_report_json(report, js);

    const auto& best = report.rows[report.chosen];
    std::printf("evaluated %zu configs (%s, %s)\n", report.rows.size(),
                cfg::measure_name(report.measure).c_str(), report.selection_rule.c_str());
    std::printf("chosen: %s (cv_mean %.6f)\n", best.config.describe().c_str(), best.cv_mean);
    std::printf("report written to %s and %s.json\n", report_out.c_str(), report_out.c_str());
    return 0;
}

int cmd_quantify(const std::string& model_path, const std::string& data_path, const std::string& out_path,
                 int jobs) {
    auto container = io::load_container(model_path);
    pipeline::verify_fingerprint(container);
    if (container.schema != corpus::Schema::BD)
        throw DataError("quantify expects a two-class topic model (subtask B/D schema)");
    auto dataset = corpus::load_dataset(data_path, container.schema);
    auto labels = pipeline::predict_container(container, dataset, nullptr, jobs);

    // group prediction counts per topic, topics in first-appearance order
    std::vector<std::string> topic_order;
    std::map<std::string, std::pair<size_t, size_t>> counts;  // topic -> (n_pos, n)
    for (size_t i = 0; i < dataset.records.size(); ++i) {
        std::string topic = dataset.records[i].topic ? *dataset.records[i].topic : "";
        auto [it, inserted] = counts.try_emplace(topic, std::make_pair<size_t, size_t>(0, 0));
        if (inserted) topic_order.push_back(topic);
        it->second.second += 1;
        if (labels[i] == "positive") it->second.first += 1;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + out_path);
    char buf[64];
    for (const auto& topic : topic_order) {
        const auto& [n_pos, n] = counts[topic];
        double p_pos = static_cast<double>(n_pos) / static_cast<double>(n);
        std::snprintf(buf, sizeof buf, "%.6f\t%.6f", p_pos, 1.0 - p_pos);
        out << topic << '\t' << buf << '\n';
    }
    std::printf("wrote prevalence estimates for %zu topics to %s\n", topic_order.size(), out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sentikit: short-text sentiment classification and quantification"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string train_path, data_path, model_path, out_path, gold_path, pred_path;
    std::string dev_path, devtest_path, pos_path, subtask_s;
    int jobs = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "run configuration file");
        sub->add_option("--subtask", common.subtask, "subtask (A, B, C or D); overrides the config");
        sub->add_option("--seed", common.seed, "random seed; overrides the config");
        sub->add_option("--jobs", common.jobs, "worker threads for independent tasks");
    };

    auto* train = app.add_subcommand("train", "train a model and write a self-contained container");
    add_common(train);
    train->add_option("--train", train_path, "training data (TSV)")->required();
    train->add_option("--model-out", out_path, "output model path")->required();

    auto* predict = app.add_subcommand("predict", "predict labels with a trained container");
    predict->add_option("--model", model_path, "model container")->required();
    predict->add_option("--data", data_path, "input data (TSV)")->required();
    predict->add_option("--out", out_path, "prediction output path")->required();
    predict->add_option("--pos", pos_path, "optional per-document POS tag file");
    predict->add_option("--jobs", jobs, "worker threads");

    auto* evaluate = app.add_subcommand("evaluate", "score predictions against gold data");
    evaluate->add_option("--gold", gold_path, "gold data (TSV)")->required();
    evaluate->add_option("--pred", pred_path, "prediction file")->required();
    evaluate->add_option("--subtask", subtask_s, "subtask (A, B, C or D)")->required();

    auto* grid = app.add_subcommand("gridsearch", "grid-search hyperparameters with k-fold CV");
    add_common(grid);
    grid->add_option("--train", train_path, "training data (TSV)")->required();
    grid->add_option("--report-out", out_path, "report output path (TSV; JSON written alongside)")
        ->required();
    grid->add_option("--dev", dev_path, "optional validation split for the three-step protocol");
    grid->add_option("--devtest", devtest_path, "optional devtest split for the three-step protocol");

    auto* quantify = app.add_subcommand("quantify", "per-topic prevalence by classify-and-count");
    quantify->add_option("--model", model_path, "model container")->required();
    quantify->add_option("--data", data_path, "input data (TSV)")->required();
    quantify->add_option("--out", out_path, "quantification output path")->required();
    quantify->add_option("--jobs", jobs, "worker threads");

    try {
        app.parse(argc, argv);
        if (train->parsed()) return cmd_train(common, train_path, out_path);
        if (predict->parsed()) return cmd_predict(model_path, data_path, out_path, pos_path, jobs);
        if (evaluate->parsed()) return cmd_evaluate(gold_path, pred_path, subtask_s);
        if (grid->parsed()) return cmd_gridsearch(common, train_path, out_path, dev_path, devtest_path);
        if (quantify->parsed()) return cmd_quantify(model_path, data_path, out_path, jobs);
        return 1;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const sentikit::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const sentikit::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return 3;
    } catch (const sentikit::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
