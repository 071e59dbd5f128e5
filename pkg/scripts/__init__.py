"""
보조 스크립트 (합성 가격 데이터 생성)
"""
