from server.evaluate import MiddleLayerEvaluate
from server.purify import MiddleLayerPurify
from server.simulate import MiddleLayerSimulate
from server.sweep import MiddleLayerSweep
from server.train import MiddleLayerTrain

simulate_ = MiddleLayerSimulate()
train_ = MiddleLayerTrain()
purify_ = MiddleLayerPurify()
evaluate_ = MiddleLayerEvaluate()
sweep_ = MiddleLayerSweep(purify_)
