"""Services package"""