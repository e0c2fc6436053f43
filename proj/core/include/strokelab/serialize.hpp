#pragma once

#include "strokelab/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace strokelab::io {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const preprocess::PcaModel& m);
preprocess::PcaModel pca_from_json(const nlohmann::json& j);

ordered_json to_json(const preprocess::Standardizer& s);
preprocess::Standardizer standardizer_from_json(const nlohmann::json& j);

ordered_json to_json(const svm::KernelSpec& k);
svm::KernelSpec kernel_from_json(const nlohmann::json& j);

ordered_json to_json(const svm::SvmModel& m);
svm::SvmModel svm_from_json(const nlohmann::json& j);

ordered_json to_json(const svm::MultiClassModel& m);
svm::MultiClassModel multiclass_from_json(const nlohmann::json& j);

ordered_json to_json(const pipeline::PipelineBundle& b);
pipeline::PipelineBundle bundle_from_json(const nlohmann::json& j);

ordered_json to_json(const pipeline::EvaluationReport& r);

ordered_json to_json(const std::vector<pipeline::SwingSegmentation>& segs);

/// Normalized dataset: one object per recording with [t, yaw, roll, pitch] rows.
ordered_json dataset_to_json(const pipeline::Dataset& d);

/// Accuracy/precision/recall/F1 per evaluation phase and kernel.
std::string metrics_csv(const ordered_json& report);
std::string roc_csv(const ordered_json& class_roc);
std::string matrix_csv(const ordered_json& matrix, std::string_view label_prefix);

/// Frame-level trace of one swing with its phase label.
std::string swing_plot_csv(const ingest::Recording& r, const pipeline::SwingSegmentation& seg);

/// Human-readable rendering of an evaluation report JSON document.
std::string render_report_text(const ordered_json& report);

}  // namespace strokelab::io
