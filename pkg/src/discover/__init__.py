"""DISCOVER: counterfactual visual interpretation of binary image classifiers.

The package trains a disentangled generative latent space around a frozen
binary classifier and exposes per-feature counterfactual traversal, Pearson
ranking of latent features against the classifier score, and SSIM-based
localization of what each traversal changes in the image.
"""

__version__ = "0.1.0"
