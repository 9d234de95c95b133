from utils.exceptions import *
from utils.indexing_utils import *
from utils.rng_utils import *
from utils.order_utils import *
from utils.metrics import *
