"""FragmentRetro 自定義異常類"""


class FragmentRetroError(Exception):
    """FragmentRetro 基礎異常類"""
    pass


class ConfigurationError(FragmentRetroError):
    """配置相關錯誤"""
    pass


class MoleculeError(FragmentRetroError):
    """分子圖相關錯誤"""
    pass


class SmilesSyntaxError(MoleculeError):
    """SMILES 語法錯誤（括號或環閉合不平衡、未知元素）"""
    pass


class MultiComponentError(MoleculeError):
    """SMILES 含有多個組分（'.'）"""
    pass


class ValenceError(MoleculeError):
    """原子超出允許價數"""
    pass


class NoSharedBondError(MoleculeError):
    """合併片段時找不到共用的斷鍵編號"""
    pass


class FragmentationError(FragmentRetroError):
    """片段化相關錯誤"""
    pass


class RuleTableError(FragmentationError):
    """規則表格式錯誤"""
    pass


class FragmenterNotFoundError(FragmentationError):
    """找不到指定的片段化器"""
    pass


class DisconnectedMembersError(FragmentationError):
    """片段組合成員在鄰接圖中不連通"""
    pass


class MatchingError(FragmentRetroError):
    """子結構匹配相關錯誤"""
    pass


class QueryHasNoInternalAtomsError(MatchingError):
    """查詢分子只有連接點（裸萬用原子）"""
    pass


class StockError(FragmentRetroError):
    """庫存相關錯誤"""
    pass


class StockIOError(StockError):
    """庫存檔案讀寫失敗"""
    pass


class TooManyParseFailuresError(StockError):
    """庫存解析失敗比例過高"""
    pass


class CacheVersionMismatchError(StockError):
    """快取版本或指紋參數不符"""
    pass


class CorruptCacheError(StockError):
    """快取檔案損毀（截斷或校驗失敗）"""
    pass


class EngineError(FragmentRetroError):
    """搜尋引擎相關錯誤"""
    pass


class EngineNotFoundError(EngineError):
    """找不到指定的搜尋引擎"""
    pass


class TooManyFragmentsError(EngineError):
    """片段數超過暴力解法上限"""
    pass


class BenchmarkError(FragmentRetroError):
    """效能量測中出現不一致的輸出（不同工作者數或篩選開關）"""
    pass
