import logging
from dataclasses import dataclass

from fusion.integration import init_fusion_params, integrate
from fusion.predictor import DensityMap, init_predictor_params, predict_density
from mpr.branch import SimilarityStack, init_mpr_params, mpr_forward
from rfl.branch import ForegroundPrediction, foreground_logits, init_rfl_params, tcn_forward
from tensorcore import ParamStore, Tensor, as_tensor, no_grad
from utils.exceptions import DimensionError
from utils.seeding import INIT_STREAM, derive_seed

logger = logging.getLogger(__name__)


@dataclass
class ModelOutputs:
    density: DensityMap
    foreground: ForegroundPrediction
    P: Tensor
    stack: SimilarityStack

    @property
    def count(self):
        return self.density.count


class RepetitionCounter:
    """
    The full counting model: MPR and RFL branches, their integration and the
    period predictor, over one shared ParamStore.

    Both branches are always built and run; the integration mode only decides
    which of them feeds the predictor.
    """

    def __init__(self, cfg):
        cfg.validate()
        self.cfg = cfg
        self.seq_len = cfg.gen.seq_len
        self.embed_dim = cfg.gen.embed_dim
        self.params = ParamStore(derive_seed(cfg.seed, INIT_STREAM))
        init_mpr_params(self.params, cfg.mpr, self.seq_len, self.embed_dim)
        init_rfl_params(self.params, cfg.rfl, self.embed_dim, self.seq_len)
        init_fusion_params(self.params, cfg.fusion, mpr_dim=cfg.mpr.scales, rfl_dim=cfg.rfl.channels)
        init_predictor_params(self.params, cfg.fusion)
        logger.debug(f'Built RepetitionCounter with {self.params.num_elements} parameters')

    def forward(self, X):
        X = as_tensor(X)
        if X.ndim != 2 or X.shape[1] != self.embed_dim:
            raise DimensionError(f'expected an N x {self.embed_dim} embedding matrix, got {list(X.shape)}')
        P, stack = mpr_forward(X, self.cfg.mpr, self.params)
        features = tcn_forward(X, self.cfg.rfl, self.params)
        foreground = foreground_logits(features, self.params)
        fused = integrate(P, features, self.cfg.fusion, self.params)
        density = predict_density(fused, self.cfg.fusion, self.params)
        return ModelOutputs(density=density, foreground=foreground, P=P, stack=stack)

    __call__ = forward

    def predict(self, X):
        with no_grad():
            return self.forward(X)

    def state_dict(self):
        return self.params.state_dict()

    def load_state_dict(self, state):
        self.params.load_state_dict(state)

    @classmethod
    def from_checkpoint(cls, checkpoint):
        model = cls(checkpoint.config)
        model.load_state_dict(checkpoint.params)
        return model
