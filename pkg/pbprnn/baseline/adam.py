# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Adam optimizer state for a list of numpy parameter arrays."""

import numpy as np

from pbprnn.exceptions import ContractError


DEFAULT_LEARNING_RATE = 0.001


class AdamState(object):
    """Moment accumulators of one parameter list.

    :type parameters: list of :class:`numpy.ndarray`
    :param parameters: the arrays that will be updated in place; the
                       accumulators take their shapes.

    :type learning_rate: float
    :param learning_rate: the step size.
    """
    def __init__(self, parameters, learning_rate=DEFAULT_LEARNING_RATE,
                 beta1=0.9, beta2=0.999, epsilon=1e-8):
        if not learning_rate > 0.0:
            raise ContractError('learning_rate must be positive')
        if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
            raise ContractError('Adam decay rates must lie in [0, 1)')
        self.step = 0
        self.learning_rate = float(learning_rate)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.epsilon = float(epsilon)
        self.first_moments = [np.zeros_like(array) for array in parameters]
        self.second_moments = [np.zeros_like(array) for array in parameters]

    def __repr__(self):
        return '<AdamState step=%d lr=%g>' % (self.step, self.learning_rate)

    def apply(self, parameters, gradients):
        """Take one step, updating ``parameters`` in place.

        :type parameters: list of :class:`numpy.ndarray`
        :type gradients: list of :class:`numpy.ndarray`

        :raises: :class:`~pbprnn.exceptions.ContractError` if the shapes do
                 not match the accumulators.
        """
        if len(parameters) != len(self.first_moments) or len(gradients) != len(
                self.first_moments):
            raise ContractError('parameter list does not match Adam state')
        self.step += 1
        correction1 = 1.0 - self.beta1 ** self.step
        correction2 = 1.0 - self.beta2 ** self.step
        step_size = self.learning_rate * np.sqrt(correction2) / correction1
        for param, grad, first, second in zip(
                parameters, gradients, self.first_moments,
                self.second_moments):
            if param.shape != first.shape or np.shape(grad) != first.shape:
                raise ContractError('gradient shape %s does not match %s' % (
                    np.shape(grad), first.shape))
            first *= self.beta1
            first += (1.0 - self.beta1) * grad
            second *= self.beta2
            second += (1.0 - self.beta2) * grad * grad
            param -= step_size * first / (np.sqrt(second) + self.epsilon)
