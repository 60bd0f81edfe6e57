#include "namegender/fusion.hpp"

#include "namegender/errors.hpp"

namespace namegender {

ImageEvidence evidence_from_observations(const std::vector<FaceObservation>& observations,
                                         int images_retrieved) {
    if (images_retrieved < 0) throw ContractViolation("images_retrieved must be non-negative");
    ImageEvidence evidence;
    evidence.per_image.resize(static_cast<size_t>(images_retrieved));

    std::vector<const FaceObservation*> chosen(static_cast<size_t>(images_retrieved), nullptr);
    for (const FaceObservation& obs : observations) {
        if (obs.image_rank < 1 || obs.image_rank > images_retrieved)
            throw ContractViolation("observation rank " + std::to_string(obs.image_rank) +
                                    " exceeds images_retrieved " +
                                    std::to_string(images_retrieved));
        const FaceObservation*& slot = chosen[static_cast<size_t>(obs.image_rank - 1)];
        if (slot == nullptr || obs.area() > slot->area()) slot = &obs;
    }
    for (size_t i = 0; i < chosen.size(); ++i) {
        if (chosen[i] == nullptr) continue;
        double magnitude = chosen[i]->confidence / 100.0;
        evidence.per_image[i] = chosen[i]->gender == "male" ? magnitude : -magnitude;
    }
    return evidence;
}

Prediction aggregate_evidence(const ImageEvidence& evidence) {
    double sum = 0.0;
    int present = 0;
    for (const auto& score : evidence.per_image) {
        if (!score) continue;
        sum += *score;
        ++present;
    }
    if (present == 0) return abstain(BackendId::Face);
    return make_prediction(sum / present, BackendId::Face);
}

Prediction aggregate_faces(const std::vector<FaceObservation>& observations,
                           int images_retrieved) {
    return aggregate_evidence(evidence_from_observations(observations, images_retrieved));
}

Prediction mixed1(const Prediction& name_pred,
                  const std::function<Prediction()>& image_pred_supplier) {
    if (name_pred.source != BackendId::Genderize)
        throw ContractViolation("mixed1 cascades from the Genderize prediction");
    if (!name_pred.is_abstain()) return make_prediction(name_pred.score, BackendId::Mixed1);
    return make_prediction(image_pred_supplier().score, BackendId::Mixed1);
}

Prediction mixed2(const Prediction& name_pred, const Prediction& image_pred) {
    return make_prediction((name_pred.score + image_pred.score) / 2.0, BackendId::Mixed2);
}

}  // namespace namegender
