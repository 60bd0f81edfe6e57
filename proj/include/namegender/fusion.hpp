#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "namegender/core.hpp"
#include "namegender/webclients.hpp"

namespace namegender {

// Per-thumbnail signed scores for one query: one slot per retrieved image,
// empty when that image contributed no face.
struct ImageEvidence {
    std::string query;
    std::vector<std::optional<double>> per_image;
};

// Per image, keeps only the largest-area face (ties: first as returned by the
// upstream) and signs its confidence/100 by gender.
ImageEvidence evidence_from_observations(const std::vector<FaceObservation>& observations,
                                         int images_retrieved);

// Arithmetic mean of the present per-image scores; no faces anywhere ->
// abstain. Throws ContractViolation when an observation's rank exceeds
// images_retrieved.
Prediction aggregate_faces(const std::vector<FaceObservation>& observations,
                           int images_retrieved);

Prediction aggregate_evidence(const ImageEvidence& evidence);

// Cascade fusion: the name backend's answer when it decides (relabeled
// Mixed1, score unchanged); otherwise the deferred image prediction. The
// supplier is never invoked when the name prediction decides. Requires
// name_pred.source == Genderize.
Prediction mixed1(const Prediction& name_pred,
                  const std::function<Prediction()>& image_pred_supplier);

// Equal-weight fusion: score = (name + image) / 2, label by sign, source
// Mixed2. An abstention contributes 0 to the mean.
Prediction mixed2(const Prediction& name_pred, const Prediction& image_pred);

}  // namespace namegender
