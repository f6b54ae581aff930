#ifndef CAFATA_CAFATA_HPP
#define CAFATA_CAFATA_HPP

// Context-aware feature attribution with argumentative explanations.

#include "cafata/analysis.hpp"
#include "cafata/argumentation.hpp"
#include "cafata/data.hpp"
#include "cafata/embedding_space.hpp"
#include "cafata/errors.hpp"
#include "cafata/evaluation.hpp"
#include "cafata/explanation.hpp"
#include "cafata/io.hpp"
#include "cafata/model.hpp"
#include "cafata/synthetic.hpp"
#include "cafata/training.hpp"

#endif  // CAFATA_CAFATA_HPP
